//! RF layer: log-distance path loss anchored at Friis, sectored antenna
//! patterns, link budgets, open-loop uplink power control.
//!
//! Path loss follows the log-distance model with free-space anchoring at
//! `d_ref = 1 m`: `PL(d) = 20·log10(4π·d_ref·f/c) + 10·n·log10(d/d_ref)`,
//! with distances clamped below `d_ref`. The incident power density carries
//! the same excess slope, `PD(d) = P·G/(4π·d²)·(d_ref/d)^(n−2)`, so the two
//! descriptions agree on how energy decays.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{
    BOLTZMANN_J_K, NOISE_TEMPERATURE_K, REFERENCE_DISTANCE_M, SPEED_OF_LIGHT_M_S,
};
use crate::topology::{azimuth, wrap_to_pi, Point2D};
use crate::{Error, Result};

/// Convert dB to a linear ratio.
pub fn linear_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear ratio to dB.
pub fn db_from_linear(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Two-level sectored gain pattern.
///
/// A main lobe of width `beamwidth_rad` centered on `boresight_rad` over a
/// constant side level, normalized so the pattern radiates unit total power:
/// `main·bw + side·(2π − bw) = 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub main_gain: f64,
    pub side_gain: f64,
    pub beamwidth_rad: f64,
    pub boresight_rad: f64,
}

impl AntennaPattern {
    /// Pattern of a uniform array with `elements` elements: beamwidth
    /// `2π/N` and main gain `N − side·(N−1)` (the unique level satisfying
    /// the normalization). One element degenerates to isotropic.
    pub fn sectored(elements: usize, side_gain: f64, boresight_rad: f64) -> Result<Self> {
        if elements == 0 {
            return Err(Error::Config("elements: must be >= 1".into()));
        }
        if !(side_gain > 0.0 && side_gain < 1.0) {
            return Err(Error::Config(format!(
                "side_gain: must be in (0, 1) (got {side_gain})"
            )));
        }
        let pattern = Self {
            main_gain: Self::sectored_main_gain(elements, side_gain),
            side_gain,
            beamwidth_rad: 2.0 * PI / elements as f64,
            boresight_rad,
        };
        pattern.validate()?;
        Ok(pattern)
    }

    /// Main-lobe gain of [`sectored`](Self::sectored) without building the
    /// pattern: `N − side·(N−1)`.
    pub fn sectored_main_gain(elements: usize, side_gain: f64) -> f64 {
        let n = elements as f64;
        n - side_gain * (n - 1.0)
    }

    /// Unit gain in every direction.
    pub fn isotropic() -> Self {
        Self {
            main_gain: 1.0,
            side_gain: 1.0,
            beamwidth_rad: 2.0 * PI,
            boresight_rad: 0.0,
        }
    }

    /// Same lobes, new pointing direction.
    pub fn steered(self, boresight_rad: f64) -> Self {
        Self {
            boresight_rad,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_gain > 0.0 && self.main_gain >= self.side_gain) {
            return Err(Error::Config(format!(
                "antenna gains: need main >= side > 0 (got main {}, side {})",
                self.main_gain, self.side_gain
            )));
        }
        if !(self.beamwidth_rad > 0.0 && self.beamwidth_rad <= 2.0 * PI) {
            return Err(Error::Config(format!(
                "beamwidth_rad: must lie in (0, 2π] (got {})",
                self.beamwidth_rad
            )));
        }
        let radiated =
            self.main_gain * self.beamwidth_rad + self.side_gain * (2.0 * PI - self.beamwidth_rad);
        if ((radiated - 2.0 * PI) / (2.0 * PI)).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "antenna normalization: pattern radiates {radiated} instead of 2π"
            )));
        }
        Ok(())
    }

    /// Gain toward `azimuth_rad`. The main-lobe boundary is inclusive.
    pub fn gain_at(&self, azimuth_rad: f64) -> f64 {
        if wrap_to_pi(azimuth_rad - self.boresight_rad).abs() <= 0.5 * self.beamwidth_rad {
            self.main_gain
        } else {
            self.side_gain
        }
    }
}

fn default_min_link_distance() -> f64 {
    REFERENCE_DISTANCE_M
}

/// Carrier- and hardware-level parameters of one air interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Log-distance path-loss exponent, `>= 2`.
    pub pathloss_exponent: f64,
    pub noise_figure_db: f64,
    /// Lower clamp of uplink power control (W).
    pub tx_power_min_w: f64,
    /// Upper clamp of uplink power control (W).
    pub tx_power_max_w: f64,
    /// Received-power setpoint of open-loop power control (W).
    pub target_rx_power_w: f64,
    /// Smallest BS↔UE separation at which links are evaluated (m).
    /// Distances below it are clamped up, an exclusion-zone assumption that
    /// keeps area statistics from being dominated by co-located pairs.
    /// Defaults to the 1 m path-loss reference (no effect).
    #[serde(default = "default_min_link_distance")]
    pub min_link_distance_m: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(Error::Config(format!(
                "carrier_hz: must be finite and > 0 (got {})",
                self.carrier_hz
            )));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::Config(format!(
                "bandwidth_hz: must be finite and > 0 (got {})",
                self.bandwidth_hz
            )));
        }
        if !(self.pathloss_exponent >= 2.0 && self.pathloss_exponent.is_finite()) {
            return Err(Error::Config(format!(
                "pathloss_exponent: must be >= 2 (got {})",
                self.pathloss_exponent
            )));
        }
        if !(self.noise_figure_db >= 0.0 && self.noise_figure_db.is_finite()) {
            return Err(Error::Config(format!(
                "noise_figure_db: must be >= 0 (got {})",
                self.noise_figure_db
            )));
        }
        if !(self.tx_power_min_w > 0.0 && self.tx_power_min_w <= self.tx_power_max_w) {
            return Err(Error::Config(format!(
                "tx_power_min_w/tx_power_max_w: need 0 < min <= max (got {} and {})",
                self.tx_power_min_w, self.tx_power_max_w
            )));
        }
        if !(self.target_rx_power_w > 0.0 && self.target_rx_power_w.is_finite()) {
            return Err(Error::Config(format!(
                "target_rx_power_w: must be finite and > 0 (got {})",
                self.target_rx_power_w
            )));
        }
        if !(self.min_link_distance_m >= 0.0 && self.min_link_distance_m.is_finite()) {
            return Err(Error::Config(format!(
                "min_link_distance_m: must be finite and >= 0 (got {})",
                self.min_link_distance_m
            )));
        }
        Ok(())
    }

    /// Thermal noise floor `k·T0·B·NF` (W).
    pub fn noise_power_w(&self) -> f64 {
        BOLTZMANN_J_K
            * NOISE_TEMPERATURE_K
            * self.bandwidth_hz
            * linear_from_db(self.noise_figure_db)
    }

    /// Distance at which a link over geometric separation `d` is evaluated.
    pub fn effective_distance(&self, distance_m: f64) -> f64 {
        distance_m.max(self.min_link_distance_m)
    }
}

/// Log-distance path loss in dB over `distance_m`.
///
/// Distances below the 1 m reference are clamped to it; non-positive or
/// non-finite distances error.
pub fn pathloss_db(params: &RadioParams, distance_m: f64) -> Result<f64> {
    if !(distance_m > 0.0 && distance_m.is_finite()) {
        return Err(Error::InvalidDistance(distance_m));
    }
    let d = distance_m.max(REFERENCE_DISTANCE_M);
    let fspl_ref_db =
        20.0 * (4.0 * PI * REFERENCE_DISTANCE_M * params.carrier_hz / SPEED_OF_LIGHT_M_S).log10();
    Ok(fspl_ref_db + 10.0 * params.pathloss_exponent * (d / REFERENCE_DISTANCE_M).log10())
}

fn validate_tx_power(tx_power_w: f64) -> Result<()> {
    if !(tx_power_w >= 0.0 && tx_power_w.is_finite()) {
        return Err(Error::Config(format!(
            "tx_power_w: must be finite and >= 0 (got {tx_power_w})"
        )));
    }
    Ok(())
}

/// Incident plane-wave power density (W/m²) that `tx_pattern` driving
/// `tx_power_w` produces at `rx_pos`.
///
/// Spherical spreading with the excess path-loss slope folded in:
/// `P·G/(4π·d²)·(d_ref/d)^(n−2)`, evaluated at the clamped link distance.
pub fn incident_power_density(
    params: &RadioParams,
    tx_pattern: &AntennaPattern,
    tx_pos: Point2D,
    rx_pos: Point2D,
    tx_power_w: f64,
) -> Result<f64> {
    validate_tx_power(tx_power_w)?;
    let bearing = azimuth(tx_pos, rx_pos)?;
    let gain = tx_pattern.gain_at(bearing);
    let d = params
        .effective_distance(tx_pos.distance(rx_pos))
        .max(REFERENCE_DISTANCE_M);
    let spreading = tx_power_w * gain / (4.0 * PI * d * d);
    Ok(spreading * (REFERENCE_DISTANCE_M / d).powf(params.pathloss_exponent - 2.0))
}

/// Everything one directed link evaluates to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Geometric separation (m), before any clamping.
    pub distance_m: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub pathloss_db: f64,
    pub rx_power_w: f64,
    /// Incident power density at the receiver position (W/m²).
    pub incident_pd_w_m2: f64,
    /// SNR of the link against the thermal floor (linear).
    pub snr: f64,
}

/// Evaluate a directed link from `tx_pos` to `rx_pos`.
///
/// Gains are read off both patterns along the connecting bearing; coincident
/// endpoints error with an undefined azimuth.
pub fn link_budget(
    params: &RadioParams,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    tx_pos: Point2D,
    rx_pos: Point2D,
    tx_power_w: f64,
) -> Result<LinkBudget> {
    validate_tx_power(tx_power_w)?;
    let distance_m = tx_pos.distance(rx_pos);
    let az_forward = azimuth(tx_pos, rx_pos)?;
    let az_reverse = azimuth(rx_pos, tx_pos)?;
    let tx_gain = tx_pattern.gain_at(az_forward);
    let rx_gain = rx_pattern.gain_at(az_reverse);
    let effective_m = params.effective_distance(distance_m);
    let pl_db = pathloss_db(params, effective_m)?;
    let rx_power_w = tx_power_w * tx_gain * rx_gain / linear_from_db(pl_db);
    let incident_pd_w_m2 = incident_power_density(params, tx_pattern, tx_pos, rx_pos, tx_power_w)?;
    Ok(LinkBudget {
        distance_m,
        tx_gain,
        rx_gain,
        pathloss_db: pl_db,
        rx_power_w,
        incident_pd_w_m2,
        snr: rx_power_w / params.noise_power_w(),
    })
}

/// Open-loop power control: the transmit power that puts
/// `target_rx_power_w` at the receiver over `pathloss_db`, clamped to the
/// transmitter's power range. Gains must be positive.
pub fn uplink_power_control(
    params: &RadioParams,
    pathloss_db: f64,
    tx_gain: f64,
    rx_gain: f64,
) -> f64 {
    debug_assert!(tx_gain > 0.0 && rx_gain > 0.0);
    let unclamped = params.target_rx_power_w * linear_from_db(pathloss_db) / (tx_gain * rx_gain);
    unclamped.clamp(params.tx_power_min_w, params.tx_power_max_w)
}

/// Shannon rate `B·log2(1 + SNR)` in bit/s.
pub fn achievable_rate(snr: f64, bandwidth_hz: f64) -> f64 {
    debug_assert!(snr >= 0.0);
    bandwidth_hz * (1.0 + snr).log2()
}
