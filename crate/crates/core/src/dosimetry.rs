//! Dosimetry: from incident power density to surface SAR.
//!
//! Tissue is a lossy dielectric `ε̃ = ε′ − j·ε″` tabulated against
//! frequency and interpolated linearly in log-frequency. A plane wave
//! entering it decays with field attenuation `α = (2πf/c)·|Im √ε̃|`, giving
//! a power penetration depth `δ_p = 1/(2α)`; the air–tissue interface
//! passes `T = 1 − |Γ|²` of the incident power, `Γ = (1 − √ε̃)/(1 + √ε̃)`.
//! Surface SAR is the transmitted density absorbed in one penetration
//! depth of tissue: `SAR = T·PD / (ρ·δ_p)`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::SPEED_OF_LIGHT_M_S;
use crate::radio::{incident_power_density, AntennaPattern, RadioParams};
use crate::topology::Topology;
use crate::{Error, Result};

/// One tabulated dielectric sample: `ε̃(f) = eps_real − j·eps_imag`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TissueRow {
    pub frequency_hz: f64,
    pub eps_real: f64,
    pub eps_imag: f64,
}

/// Dielectric table plus mass density of the exposed tissue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TissueModel {
    pub density_kg_m3: f64,
    /// Rows sorted by strictly increasing frequency.
    pub table: Vec<TissueRow>,
}

impl TissueModel {
    pub fn new(density_kg_m3: f64, table: Vec<TissueRow>) -> Result<Self> {
        let model = Self {
            density_kg_m3,
            table,
        };
        model.validate()?;
        Ok(model)
    }

    /// Skin-like defaults spanning 1.9–60 GHz.
    ///
    /// Dry-skin style values: permittivity falls and relative loss grows
    /// toward millimeter waves, which is what drives the much shallower
    /// penetration (and higher surface SAR) at 28 GHz than at 2 GHz.
    pub fn default_skin() -> Self {
        Self {
            density_kg_m3: 1100.0,
            table: vec![
                TissueRow {
                    frequency_hz: 1.9e9,
                    eps_real: 38.8,
                    eps_imag: 11.3,
                },
                TissueRow {
                    frequency_hz: 2.0e9,
                    eps_real: 38.6,
                    eps_imag: 11.4,
                },
                TissueRow {
                    frequency_hz: 28.0e9,
                    eps_real: 16.5,
                    eps_imag: 16.6,
                },
                TissueRow {
                    frequency_hz: 60.0e9,
                    eps_real: 7.98,
                    eps_imag: 10.9,
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density_kg_m3 > 0.0 && self.density_kg_m3.is_finite()) {
            return Err(Error::Config(format!(
                "density_kg_m3: must be finite and > 0 (got {})",
                self.density_kg_m3
            )));
        }
        if self.table.is_empty() {
            return Err(Error::Config(
                "tissue table: must have at least one row".into(),
            ));
        }
        for (i, row) in self.table.iter().enumerate() {
            if !(row.frequency_hz > 0.0 && row.frequency_hz.is_finite()) {
                return Err(Error::Config(format!(
                    "tissue table row {i}: frequency_hz must be finite and > 0"
                )));
            }
            if !(row.eps_real >= 1.0 && row.eps_real.is_finite()) {
                return Err(Error::Config(format!(
                    "tissue table row {i}: eps_real must be >= 1"
                )));
            }
            if !(row.eps_imag >= 0.0 && row.eps_imag.is_finite()) {
                return Err(Error::Config(format!(
                    "tissue table row {i}: eps_imag must be >= 0"
                )));
            }
            if i > 0 && row.frequency_hz <= self.table[i - 1].frequency_hz {
                return Err(Error::Config(format!(
                    "tissue table row {i}: frequencies must be strictly increasing"
                )));
            }
        }
        Ok(())
    }

    /// Parse a structured text table: one `frequency_hz eps_real eps_imag`
    /// row per line, comma- or whitespace-separated; `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Vec<TissueRow>> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if fields.len() != 3 {
                return Err(Error::Config(format!(
                    "tissue table line {}: expected 3 fields (frequency_hz, eps_real, eps_imag), got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str, name: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "tissue table line {}: {name} `{s}` is not a number",
                        lineno + 1
                    ))
                })
            };
            rows.push(TissueRow {
                frequency_hz: parse(fields[0], "frequency_hz")?,
                eps_real: parse(fields[1], "eps_real")?,
                eps_imag: parse(fields[2], "eps_imag")?,
            });
        }
        Ok(rows)
    }

    /// Load a table file and pair it with a density.
    pub fn from_table_file(path: &Path, density_kg_m3: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::new(density_kg_m3, Self::parse_table(&text)?)
    }

    /// Complex relative permittivity at `frequency_hz`, interpolated
    /// linearly in `log10 f` per component. Errors outside the table span.
    pub fn permittivity_at(&self, frequency_hz: f64) -> Result<Complex64> {
        let first = &self.table[0];
        let last = &self.table[self.table.len() - 1];
        if !(frequency_hz >= first.frequency_hz && frequency_hz <= last.frequency_hz) {
            return Err(Error::FrequencyOutsideTable {
                frequency_hz,
                min_hz: first.frequency_hz,
                max_hz: last.frequency_hz,
            });
        }
        // Index of the first row at or above the query.
        let hi = self
            .table
            .partition_point(|row| row.frequency_hz < frequency_hz);
        let row_hi = &self.table[hi.min(self.table.len() - 1)];
        if row_hi.frequency_hz == frequency_hz {
            return Ok(Complex64::new(row_hi.eps_real, -row_hi.eps_imag));
        }
        let row_lo = &self.table[hi - 1];
        let t = (frequency_hz.log10() - row_lo.frequency_hz.log10())
            / (row_hi.frequency_hz.log10() - row_lo.frequency_hz.log10());
        let eps_real = row_lo.eps_real + t * (row_hi.eps_real - row_lo.eps_real);
        let eps_imag = row_lo.eps_imag + t * (row_hi.eps_imag - row_lo.eps_imag);
        Ok(Complex64::new(eps_real, -eps_imag))
    }
}

/// Power penetration depth `δ_p = 1/(2α)` (m) at `frequency_hz`.
///
/// Errors when the interpolated tissue is lossless — the depth would be
/// unbounded — or when the frequency falls outside the table.
pub fn penetration_depth_m(tissue: &TissueModel, frequency_hz: f64) -> Result<f64> {
    let eps = tissue.permittivity_at(frequency_hz)?;
    if eps.im == 0.0 {
        return Err(Error::LosslessMedium);
    }
    let refractive = eps.sqrt();
    let alpha = 2.0 * PI * frequency_hz / SPEED_OF_LIGHT_M_S * refractive.im.abs();
    Ok(1.0 / (2.0 * alpha))
}

/// Normal-incidence power transmittance of the air–tissue interface.
///
/// Defined for lossless tissue as well (vacuum rows give exactly 1).
pub fn transmittance(tissue: &TissueModel, frequency_hz: f64) -> Result<f64> {
    let eps = tissue.permittivity_at(frequency_hz)?;
    let refractive = eps.sqrt();
    let gamma = (Complex64::new(1.0, 0.0) - refractive) / (Complex64::new(1.0, 0.0) + refractive);
    Ok(1.0 - gamma.norm_sqr())
}

/// Precomputed incident-PD → surface-SAR conversion at one frequency.
///
/// Every SAR in the crate goes through this one factor, so predicted and
/// reported values for the same scene agree bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SarConverter {
    pub transmittance: f64,
    pub penetration_depth_m: f64,
    /// `T / (ρ·δ_p)` (kg⁻¹·m²... applied as SAR = factor · PD).
    pub pd_to_sar: f64,
}

impl SarConverter {
    pub fn new(tissue: &TissueModel, frequency_hz: f64) -> Result<Self> {
        let transmittance = transmittance(tissue, frequency_hz)?;
        let penetration_depth_m = penetration_depth_m(tissue, frequency_hz)?;
        Ok(Self {
            transmittance,
            penetration_depth_m,
            pd_to_sar: transmittance / (tissue.density_kg_m3 * penetration_depth_m),
        })
    }

    /// Surface SAR (W/kg) produced by `incident_pd_w_m2`.
    pub fn convert(&self, incident_pd_w_m2: f64) -> f64 {
        debug_assert!(incident_pd_w_m2 >= 0.0);
        incident_pd_w_m2 * self.pd_to_sar
    }
}

/// Surface SAR (W/kg): the transmitted fraction of `incident_pd_w_m2`
/// absorbed within one penetration depth, `T·PD/(ρ·δ_p)`.
pub fn surface_sar(incident_pd_w_m2: f64, tissue: &TissueModel, frequency_hz: f64) -> Result<f64> {
    Ok(SarConverter::new(tissue, frequency_hz)?.convert(incident_pd_w_m2))
}

/// Regulatory-style thresholds, plus the protocol's handover trigger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureLimits {
    pub pd_limit_w_m2: f64,
    pub sar_limit_w_kg: f64,
    /// SAR level at which the protocol reacts; at most the SAR limit.
    pub sar_trigger_w_kg: f64,
}

impl ExposureLimits {
    pub fn validate(&self) -> Result<()> {
        if !(self.pd_limit_w_m2 > 0.0 && self.sar_limit_w_kg > 0.0) {
            return Err(Error::Config(
                "pd_limit_w_m2/sar_limit_w_kg: limits must be > 0".into(),
            ));
        }
        if !(self.sar_trigger_w_kg > 0.0 && self.sar_trigger_w_kg <= self.sar_limit_w_kg) {
            return Err(Error::Config(format!(
                "sar_trigger_w_kg: must be in (0, sar_limit_w_kg] (got {} vs limit {})",
                self.sar_trigger_w_kg, self.sar_limit_w_kg
            )));
        }
        Ok(())
    }
}

/// Contribution of one emitter to an assessment point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceContribution {
    /// BS index for downlink reports; 0 (the UE's own device) for uplink.
    pub source: usize,
    pub pd_w_m2: f64,
}

/// Exposure at one assessment point, checked against limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureReport {
    /// Total incident power density (W/m²).
    pub incident_pd_w_m2: f64,
    /// Surface SAR of the total (W/kg).
    pub sar_w_kg: f64,
    pub per_source: Vec<SourceContribution>,
    /// `incident_pd / pd_limit`; 1.0 sits exactly at the limit.
    pub pd_limit_fraction: f64,
    /// `sar / sar_limit`.
    pub sar_limit_fraction: f64,
    /// True iff both fractions are at most 1 (boundary inclusive).
    pub compliant: bool,
}

/// Fold raw exposure numbers and limits into a finished report.
pub fn compliance(
    incident_pd_w_m2: f64,
    sar_w_kg: f64,
    per_source: Vec<SourceContribution>,
    limits: &ExposureLimits,
) -> ExposureReport {
    let pd_limit_fraction = incident_pd_w_m2 / limits.pd_limit_w_m2;
    let sar_limit_fraction = sar_w_kg / limits.sar_limit_w_kg;
    ExposureReport {
        incident_pd_w_m2,
        sar_w_kg,
        per_source,
        pd_limit_fraction,
        sar_limit_fraction,
        compliant: pd_limit_fraction <= 1.0 && sar_limit_fraction <= 1.0,
    }
}

/// Downlink exposure of user `ue`: every BS contributes incident power
/// density through its own pattern and power; the SAR is taken on the sum.
///
/// `patterns[b]` and `powers[b]` describe BS `b`; contributions are
/// accumulated in BS index order, so reports are deterministic.
pub fn downlink_exposure(
    topology: &Topology,
    patterns: &[AntennaPattern],
    powers: &[f64],
    params: &RadioParams,
    ue: usize,
    tissue: &TissueModel,
    limits: &ExposureLimits,
) -> Result<ExposureReport> {
    let n = topology.bs_positions.len();
    if patterns.len() != n || powers.len() != n {
        return Err(Error::Config(format!(
            "patterns/powers: need one entry per BS ({} BSs, {} patterns, {} powers)",
            n,
            patterns.len(),
            powers.len()
        )));
    }
    let ue_pos = *topology.ue_positions.get(ue).ok_or_else(|| {
        Error::Config(format!(
            "ue: index {ue} out of range ({} UEs)",
            topology.ue_positions.len()
        ))
    })?;
    let converter = SarConverter::new(tissue, params.carrier_hz)?;
    let mut per_source = Vec::with_capacity(n);
    let mut total = 0.0;
    for (b, (pattern, &power)) in patterns.iter().zip(powers).enumerate() {
        let pd = incident_power_density(params, pattern, topology.bs_positions[b], ue_pos, power)?;
        per_source.push(SourceContribution {
            source: b,
            pd_w_m2: pd,
        });
        total += pd;
    }
    Ok(compliance(
        total,
        converter.convert(total),
        per_source,
        limits,
    ))
}

/// Power density the device's own transmission puts on the head:
/// `PD = P·G(head azimuth)/(4π·d²)`, with no path-loss excess and no
/// reference clamp — the head sits in the near field, centimeters away.
///
/// Shared by the exposure report and the handover protocol's emission
/// predictions so both see bit-identical values.
pub fn device_head_pd(
    tx_power_w: f64,
    pattern: &AntennaPattern,
    head_azimuth_rad: f64,
    device_head_distance_m: f64,
) -> f64 {
    tx_power_w * pattern.gain_at(head_azimuth_rad)
        / (4.0 * PI * device_head_distance_m * device_head_distance_m)
}

/// Uplink (own-device) exposure: [`device_head_pd`] of the UE's pattern
/// at `device_head_distance_m`, converted to surface SAR.
pub fn uplink_exposure(
    tx_power_w: f64,
    pattern: &AntennaPattern,
    head_azimuth_rad: f64,
    device_head_distance_m: f64,
    tissue: &TissueModel,
    carrier_hz: f64,
    limits: &ExposureLimits,
) -> Result<ExposureReport> {
    if !(tx_power_w >= 0.0 && tx_power_w.is_finite()) {
        return Err(Error::Config(format!(
            "tx_power_w: must be finite and >= 0 (got {tx_power_w})"
        )));
    }
    if !(device_head_distance_m > 0.0 && device_head_distance_m.is_finite()) {
        return Err(Error::InvalidDistance(device_head_distance_m));
    }
    let pd = device_head_pd(
        tx_power_w,
        pattern,
        head_azimuth_rad,
        device_head_distance_m,
    );
    let sar = surface_sar(pd, tissue, carrier_hz)?;
    Ok(compliance(
        pd,
        sar,
        vec![SourceContribution {
            source: 0,
            pd_w_m2: pd,
        }],
        limits,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Point2D;
    use approx::assert_relative_eq;

    fn limits() -> ExposureLimits {
        ExposureLimits {
            pd_limit_w_m2: 10.0,
            sar_limit_w_kg: 1.6,
            sar_trigger_w_kg: 1.6,
        }
    }

    // Frozen against an independent implementation (complex arithmetic in
    // polar form): δ_p and T at every default table row.
    const ROW_ORACLES: [(f64, f64, f64); 4] = [
        (1.9e9, 1.398586366457e-2, 0.466184129436),
        (2.0e9, 1.313974579841e-2, 0.466778263671),
        (28.0e9, 4.585378939889e-4, 0.535929458655),
        (60.0e9, 2.391416319453e-4, 0.622440609381),
    ];

    #[test]
    fn penetration_depth_matches_oracle_rows() {
        let tissue = TissueModel::default_skin();
        for (f, depth, _) in ROW_ORACLES {
            assert_relative_eq!(
                penetration_depth_m(&tissue, f).unwrap(),
                depth,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn transmittance_matches_oracle_rows() {
        let tissue = TissueModel::default_skin();
        for (f, _, t) in ROW_ORACLES {
            assert_relative_eq!(transmittance(&tissue, f).unwrap(), t, max_relative = 1e-10);
        }
    }

    #[test]
    fn surface_sar_frozen_value() {
        // 10 W/m² on skin at 28 GHz.
        let tissue = TissueModel::default_skin();
        let sar = surface_sar(10.0, &tissue, 28e9).unwrap();
        assert_relative_eq!(sar, 10.62526358593928, max_relative = 1e-12);
    }

    #[test]
    fn sar_scales_exactly_with_density_halving() {
        let tissue = TissueModel::default_skin();
        let s1 = surface_sar(3.7, &tissue, 28e9).unwrap();
        let s2 = surface_sar(7.4, &tissue, 28e9).unwrap();
        assert_eq!(s2, 2.0 * s1);
        assert_eq!(surface_sar(0.0, &tissue, 28e9).unwrap(), 0.0);
    }

    #[test]
    fn interpolation_hits_rows_exactly_and_is_monotone_between() {
        let tissue = TissueModel::default_skin();
        let eps = tissue.permittivity_at(2e9).unwrap();
        assert_eq!(eps.re, 38.6);
        assert_eq!(eps.im, -11.4);
        // Log-midpoint of the 2–28 GHz bracket interpolates halfway.
        let mid = (2e9f64 * 28e9f64).sqrt();
        let eps = tissue.permittivity_at(mid).unwrap();
        assert_relative_eq!(eps.re, (38.6 + 16.5) / 2.0, max_relative = 1e-9);
        assert_relative_eq!(eps.im, -(11.4 + 16.6) / 2.0, max_relative = 1e-9);
        // Penetration depth falls monotonically across the band.
        let mut last = f64::INFINITY;
        let (lo, hi) = (1.9e9f64.log10(), 60e9f64.log10());
        for i in 0..=200 {
            // Clamp: powf can land an ulp outside the table span.
            let f = 10f64
                .powf(lo + (hi - lo) * i as f64 / 200.0)
                .clamp(1.9e9, 60e9);
            let d = penetration_depth_m(&tissue, f).unwrap();
            assert!(d < last, "depth not decreasing at {f} Hz");
            last = d;
        }
    }

    #[test]
    fn out_of_table_queries_error() {
        let tissue = TissueModel::default_skin();
        for f in [1.0e9, 61e9] {
            let err = penetration_depth_m(&tissue, f).unwrap_err();
            assert!(err
                .to_string()
                .starts_with("frequency outside tissue table"));
        }
        // Boundaries are inside.
        assert!(penetration_depth_m(&tissue, 1.9e9).is_ok());
        assert!(penetration_depth_m(&tissue, 60e9).is_ok());
    }

    #[test]
    fn lossless_tissue_has_unbounded_depth_but_valid_transmittance() {
        let vacuumish = TissueModel::new(
            1000.0,
            vec![
                TissueRow {
                    frequency_hz: 1e9,
                    eps_real: 1.0,
                    eps_imag: 0.0,
                },
                TissueRow {
                    frequency_hz: 1e10,
                    eps_real: 1.0,
                    eps_imag: 0.0,
                },
            ],
        )
        .unwrap();
        let err = penetration_depth_m(&vacuumish, 2e9).unwrap_err();
        assert!(err.to_string().starts_with("lossless medium"));
        assert_eq!(transmittance(&vacuumish, 2e9).unwrap(), 1.0);
    }

    #[test]
    fn table_validation_names_the_problem() {
        let unsorted = TissueModel::new(
            1100.0,
            vec![
                TissueRow {
                    frequency_hz: 2e9,
                    eps_real: 38.6,
                    eps_imag: 11.4,
                },
                TissueRow {
                    frequency_hz: 2e9,
                    eps_real: 16.5,
                    eps_imag: 16.6,
                },
            ],
        );
        assert!(unsorted
            .unwrap_err()
            .to_string()
            .contains("strictly increasing"));
        assert!(TissueModel::new(0.0, TissueModel::default_skin().table)
            .unwrap_err()
            .to_string()
            .contains("density_kg_m3"));
        assert!(TissueModel::new(1100.0, vec![])
            .unwrap_err()
            .to_string()
            .contains("at least one row"));
    }

    #[test]
    fn parses_text_tables() {
        let text = "# skin\n1.9e9, 38.8, 11.3\n2e9 38.6 11.4  # inline comment\n\n28e9,16.5,16.6\n";
        let rows = TissueModel::parse_table(text).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].eps_imag, 11.4);
        let err = TissueModel::parse_table("1e9, 38.8\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        let err = TissueModel::parse_table("1e9, x, 11.3\n").unwrap_err();
        assert!(err.to_string().contains("eps_real"));
    }

    #[test]
    // The frozen PD coincides with 2/π: 0.02 W over a 0.01π m² shell.
    #[allow(clippy::approx_constant)]
    fn uplink_exposure_frozen_values() {
        // 0.2 W through a side lobe (gain 0.1) at 5 cm.
        let tissue = TissueModel::default_skin();
        let pattern = AntennaPattern::sectored(8, 0.1, 0.0).unwrap();
        let report = uplink_exposure(0.2, &pattern, PI, 0.05, &tissue, 28e9, &limits()).unwrap();
        assert_relative_eq!(
            report.incident_pd_w_m2,
            0.6366197723675814,
            max_relative = 1e-12
        );
        assert_relative_eq!(report.sar_w_kg, 0.6764252885426216, max_relative = 1e-12);
        assert_eq!(report.per_source.len(), 1);
        assert_eq!(report.per_source[0].pd_w_m2, report.incident_pd_w_m2);
        assert!(report.compliant);
        assert_relative_eq!(report.sar_limit_fraction, report.sar_w_kg / 1.6);
    }

    #[test]
    fn uplink_main_lobe_toward_head_is_noncompliant() {
        let tissue = TissueModel::default_skin();
        let pattern = AntennaPattern::sectored(8, 0.1, 0.0).unwrap();
        let report = uplink_exposure(0.2, &pattern, 0.0, 0.05, &tissue, 28e9, &limits()).unwrap();
        assert!(report.sar_w_kg > 1.6);
        assert!(!report.compliant);
    }

    #[test]
    fn uplink_rejects_bad_head_distance() {
        let tissue = TissueModel::default_skin();
        let pattern = AntennaPattern::isotropic();
        for d in [0.0, -0.05] {
            let err = uplink_exposure(0.1, &pattern, 0.0, d, &tissue, 28e9, &limits()).unwrap_err();
            assert!(err.to_string().starts_with("invalid distance"));
        }
    }

    fn two_bs_scene() -> Topology {
        Topology {
            bs_positions: vec![Point2D::new(0.0, 0.0), Point2D::new(0.0, 0.0)],
            ue_positions: vec![Point2D::new(100.0, 0.0)],
            head_azimuth_rad: vec![0.0],
            seed_used: 0,
        }
    }

    fn radio_params() -> RadioParams {
        RadioParams {
            carrier_hz: 28e9,
            bandwidth_hz: 400e6,
            pathloss_exponent: 2.0,
            noise_figure_db: 9.0,
            tx_power_min_w: 1e-7,
            tx_power_max_w: 0.2,
            target_rx_power_w: 1e-10,
            min_link_distance_m: 1.0,
        }
    }

    #[test]
    fn downlink_contributions_add_in_index_order() {
        let topo = two_bs_scene();
        let tissue = TissueModel::default_skin();
        let pat = AntennaPattern::sectored(12, 0.1, 0.0).unwrap();
        let one = downlink_exposure(
            &topo,
            &[pat, pat.steered(PI)],
            &[1.0, 0.0],
            &radio_params(),
            0,
            &tissue,
            &limits(),
        )
        .unwrap();
        assert_relative_eq!(
            one.incident_pd_w_m2,
            8.673944398508296e-05,
            max_relative = 1e-12
        );
        let both = downlink_exposure(
            &topo,
            &[pat, pat],
            &[1.0, 1.0],
            &radio_params(),
            0,
            &tissue,
            &limits(),
        )
        .unwrap();
        // Co-located identical sources double the density exactly.
        assert_eq!(both.incident_pd_w_m2, 2.0 * one.incident_pd_w_m2);
        assert_eq!(both.per_source.len(), 2);
        assert_eq!(
            (both.per_source[0].source, both.per_source[1].source),
            (0, 1)
        );
        assert_eq!(both.per_source[0].pd_w_m2, both.per_source[1].pd_w_m2);
        assert!(both.compliant);
    }

    #[test]
    fn downlink_all_silent_is_zero_and_compliant() {
        let topo = two_bs_scene();
        let tissue = TissueModel::default_skin();
        let pat = AntennaPattern::isotropic();
        let report = downlink_exposure(
            &topo,
            &[pat, pat],
            &[0.0, 0.0],
            &radio_params(),
            0,
            &tissue,
            &limits(),
        )
        .unwrap();
        assert_eq!(report.incident_pd_w_m2, 0.0);
        assert_eq!(report.sar_w_kg, 0.0);
        assert!(report.compliant);
    }

    #[test]
    fn downlink_validates_shapes() {
        let topo = two_bs_scene();
        let tissue = TissueModel::default_skin();
        let pat = AntennaPattern::isotropic();
        let err = downlink_exposure(
            &topo,
            &[pat],
            &[1.0, 1.0],
            &radio_params(),
            0,
            &tissue,
            &limits(),
        );
        assert!(err.unwrap_err().to_string().contains("one entry per BS"));
        let err = downlink_exposure(
            &topo,
            &[pat, pat],
            &[1.0, 1.0],
            &radio_params(),
            7,
            &tissue,
            &limits(),
        );
        assert!(err.unwrap_err().to_string().contains("out of range"));
    }

    #[test]
    fn compliance_boundary_is_inclusive() {
        let report = compliance(10.0, 1.6, vec![], &limits());
        assert_eq!(report.pd_limit_fraction, 1.0);
        assert_eq!(report.sar_limit_fraction, 1.0);
        assert!(report.compliant);
        let report = compliance(10.0 * (1.0 + 1e-12), 0.0, vec![], &limits());
        assert!(!report.compliant);
    }

    #[test]
    fn limits_validation() {
        let mut l = limits();
        l.sar_trigger_w_kg = 2.0;
        assert!(l.validate().is_err());
        l.sar_trigger_w_kg = 0.5;
        assert!(l.validate().is_ok());
        l.pd_limit_w_m2 = 0.0;
        assert!(l.validate().is_err());
    }
}
