//! Trial pipeline and Monte Carlo campaigns.
//!
//! A trial: draw a topology, attach every UE to its nearest BS under
//! power control, aim serving BSs at their users (idle ones at random),
//! run the SAR-triggered uplink reassociation, pick each UE's
//! least-exposure downlink server, and score both directions
//! dosimetrically. A campaign repeats that over derived per-trial seeds —
//! in parallel when the `parallel` feature is on — and aggregates
//! statistics in trial order, so results are identical at any parallelism.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dosimetry::{
    downlink_exposure, uplink_exposure, ExposureLimits, ExposureReport, TissueModel,
};
use crate::protocol::{
    initial_association, select_downlink, step_uplink, HandoverCause, HandoverDecision,
    ProtocolContext,
};
use crate::radio::{incident_power_density, AntennaPattern, RadioParams};
use crate::seed::{derive_seed, rng_from_seed};
use crate::topology::{azimuth, sample_topology, DeploymentConfig, DeploymentMode, Topology};
use crate::{Error, Result};

/// Names accepted by [`preset`].
pub const TECHNOLOGY_NAMES: [&str; 3] = ["5G", "4G", "3.9G"];

/// One technology generation: radio parameters plus deployment texture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyProfile {
    pub name: String,
    pub radio: RadioParams,
    /// Nominal cell radius (m); sets BS density or lattice pitch.
    pub cell_radius_m: f64,
    pub bs_elements: usize,
    pub ue_elements: usize,
    /// Side-lobe gain shared by both ends' patterns.
    pub side_gain: f64,
    /// Downlink transmit power per BS (W).
    pub bs_tx_power_w: f64,
    /// Uplink SNR a BS must reach (at capped power) to be a candidate.
    pub uplink_snr_floor: f64,
    /// Downlink rate a BS must offer to be eligible to serve (bit/s).
    pub downlink_rate_floor_bps: f64,
}

impl TechnologyProfile {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("name: must not be empty".into()));
        }
        self.radio.validate()?;
        if !(self.cell_radius_m > 0.0 && self.cell_radius_m.is_finite()) {
            return Err(Error::Config(format!(
                "cell_radius_m: must be finite and > 0 (got {})",
                self.cell_radius_m
            )));
        }
        if !(self.bs_tx_power_w >= 0.0 && self.bs_tx_power_w.is_finite()) {
            return Err(Error::Config(format!(
                "bs_tx_power_w: must be finite and >= 0 (got {})",
                self.bs_tx_power_w
            )));
        }
        if !(self.uplink_snr_floor >= 0.0 && self.uplink_snr_floor.is_finite()) {
            return Err(Error::Config(format!(
                "uplink_snr_floor: must be finite and >= 0 (got {})",
                self.uplink_snr_floor
            )));
        }
        if !(self.downlink_rate_floor_bps >= 0.0 && self.downlink_rate_floor_bps.is_finite()) {
            return Err(Error::Config(format!(
                "downlink_rate_floor_bps: must be finite and >= 0 (got {})",
                self.downlink_rate_floor_bps
            )));
        }
        // Both patterns must be constructible.
        AntennaPattern::sectored(self.bs_elements, self.side_gain, 0.0)?;
        AntennaPattern::sectored(self.ue_elements, self.side_gain, 0.0)?;
        Ok(())
    }
}

fn base_radio(carrier_hz: f64, bandwidth_hz: f64, pathloss_exponent: f64) -> RadioParams {
    let mut radio = RadioParams {
        carrier_hz,
        bandwidth_hz,
        pathloss_exponent,
        noise_figure_db: 9.0,
        tx_power_min_w: 1e-7,
        tx_power_max_w: 0.2,
        target_rx_power_w: 1.0, // overwritten below
        min_link_distance_m: 10.0,
    };
    // Open-loop setpoint expressed as a target SNR over the thermal floor.
    radio.target_rx_power_w = 10.0 * radio.noise_power_w();
    radio
}

/// Built-in technology profiles.
///
/// * `5G`: 28 GHz mmWave, 400 MHz, dense small cells (200 m), 64-element
///   BS / 8-element UE arrays, 1 W BSs, urban-canyon exponent 2.5.
/// * `4G`: 2 GHz, 20 MHz, 500 m macro cells, 8-element BS arrays,
///   isotropic UEs, 10 W BSs.
/// * `3.9G`: 1.9 GHz, 20 MHz, 1 km macro cells, relaxed service targets
///   (0 dB uplink SNR setpoint, 10 Mbit/s downlink floor).
pub fn preset(name: &str) -> Result<TechnologyProfile> {
    match name {
        "5G" => Ok(TechnologyProfile {
            name: name.into(),
            radio: base_radio(28e9, 400e6, 2.5),
            cell_radius_m: 200.0,
            bs_elements: 64,
            ue_elements: 8,
            side_gain: 0.1,
            bs_tx_power_w: 1.0,
            uplink_snr_floor: 1.0,
            downlink_rate_floor_bps: 1e9,
        }),
        "4G" => Ok(TechnologyProfile {
            name: name.into(),
            radio: base_radio(2e9, 20e6, 2.0),
            cell_radius_m: 500.0,
            bs_elements: 8,
            ue_elements: 1,
            side_gain: 0.1,
            bs_tx_power_w: 10.0,
            uplink_snr_floor: 1.0,
            downlink_rate_floor_bps: 5e7,
        }),
        "3.9G" => {
            let mut radio = base_radio(1.9e9, 20e6, 2.0);
            radio.target_rx_power_w = radio.noise_power_w(); // 0 dB setpoint
            Ok(TechnologyProfile {
                name: name.into(),
                radio,
                cell_radius_m: 1000.0,
                bs_elements: 8,
                ue_elements: 1,
                side_gain: 0.1,
                bs_tx_power_w: 10.0,
                uplink_snr_floor: 1.0,
                downlink_rate_floor_bps: 1e7,
            })
        }
        other => Err(Error::UnknownTechnology(other.into())),
    }
}

/// Scene-level knobs shared by every technology in a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub window_m: (f64, f64),
    pub mode: DeploymentMode,
    pub ue_count: usize,
    pub tissue: TissueModel,
    pub limits: ExposureLimits,
    pub device_head_distance_m: f64,
    pub sar_trigger_margin: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            window_m: (3000.0, 3000.0),
            mode: DeploymentMode::Ppp,
            ue_count: 8,
            tissue: TissueModel::default_skin(),
            limits: ExposureLimits {
                pd_limit_w_m2: 10.0,
                sar_limit_w_kg: 1.6,
                sar_trigger_w_kg: 1.6,
            },
            device_head_distance_m: 0.05,
            sar_trigger_margin: 0.0,
        }
    }
}

impl SimulationSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_m.0 > 0.0 && self.window_m.1 > 0.0) {
            return Err(Error::Config(format!(
                "window_m: extents must be > 0 (got {} x {})",
                self.window_m.0, self.window_m.1
            )));
        }
        if self.ue_count == 0 {
            return Err(Error::Config("ue_count: must be >= 1".into()));
        }
        self.tissue.validate()?;
        self.limits.validate()?;
        if !(self.device_head_distance_m > 0.0 && self.device_head_distance_m.is_finite()) {
            return Err(Error::Config(format!(
                "device_head_distance_m: must be finite and > 0 (got {})",
                self.device_head_distance_m
            )));
        }
        if !(self.sar_trigger_margin >= 0.0 && self.sar_trigger_margin.is_finite()) {
            return Err(Error::Config(format!(
                "sar_trigger_margin: must be finite and >= 0 (got {})",
                self.sar_trigger_margin
            )));
        }
        Ok(())
    }
}

/// Everything recorded about one UE in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeOutcome {
    pub initial_serving_bs: usize,
    pub uplink_serving_bs: usize,
    pub downlink_serving_bs: usize,
    pub ue_tx_power_w: f64,
    pub triggered: bool,
    pub uplink_outage: bool,
    pub downlink_outage: bool,
    /// Serving-link incident PD of the nearest-BS association, before any
    /// exposure-aware reselection (W/m²).
    pub baseline_downlink_pd_w_m2: f64,
    pub uplink: ExposureReport,
    pub downlink: ExposureReport,
}

/// Full record of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Index within the campaign (assigned by [`run_campaign`]).
    pub trial_index: usize,
    pub seed: u64,
    /// True when the topology draw stayed empty and the trial ran nothing.
    pub skipped: bool,
    pub bs_count: usize,
    pub topology: Option<Topology>,
    pub bs_boresights: Vec<f64>,
    pub decisions: Vec<HandoverDecision>,
    pub ues: Vec<UeOutcome>,
}

impl TrialRecord {
    pub fn skipped(trial_index: usize, seed: u64) -> Self {
        Self {
            trial_index,
            seed,
            skipped: true,
            bs_count: 0,
            topology: None,
            bs_boresights: Vec::new(),
            decisions: Vec::new(),
            ues: Vec::new(),
        }
    }
}

/// Downlink exposure of `ue` with `serving` beamforming at it and every
/// other BS on its assigned boresight.
fn downlink_report_with_serving(
    topology: &Topology,
    ue: usize,
    serving: usize,
    boresights: &[f64],
    powers: &[f64],
    ctx: &ProtocolContext,
) -> Result<ExposureReport> {
    let mut scene: Vec<AntennaPattern> = boresights.iter().map(|&b| ctx.bs_pattern(b)).collect();
    let toward_ue = azimuth(topology.bs_positions[serving], topology.ue_positions[ue])?;
    scene[serving] = ctx.bs_pattern(toward_ue);
    downlink_exposure(
        topology,
        &scene,
        powers,
        &ctx.profile.radio,
        ue,
        ctx.tissue,
        ctx.limits,
    )
}

/// Run one seeded trial of `profile` under `settings`.
///
/// An empty PPP draw surfaces as [`Error::EmptyDeployment`]; the campaign
/// turns that into a skipped record. `trial_index` is left at 0 for the
/// campaign to assign.
pub fn run_trial(
    profile: &TechnologyProfile,
    settings: &SimulationSettings,
    trial_seed: u64,
) -> Result<TrialRecord> {
    settings.validate()?;
    let ctx = ProtocolContext::new(
        profile,
        &settings.tissue,
        &settings.limits,
        settings.device_head_distance_m,
        settings.sar_trigger_margin,
    )?;
    let topology = sample_topology(&DeploymentConfig {
        window_m: settings.window_m,
        mode: settings.mode,
        cell_radius_m: profile.cell_radius_m,
        seed: derive_seed(trial_seed, 0),
        ue_count: settings.ue_count,
    })?;
    let n_bs = topology.bs_positions.len();
    let n_ue = topology.ue_positions.len();
    let params = &profile.radio;

    let mut state = initial_association(&topology, &ctx)?;
    let initial_serving = state.serving_bs.clone();

    // Downlink transmit directions: serving BSs aim at their lowest-index
    // initial user; idle BSs draw a direction from the auxiliary stream.
    let mut aux = rng_from_seed(derive_seed(trial_seed, 1));
    let mut bs_boresights = Vec::with_capacity(n_bs);
    for bs in 0..n_bs {
        let assigned = (0..n_ue).find(|&ue| initial_serving[ue] == bs);
        let bore = match assigned {
            Some(ue) => azimuth(topology.bs_positions[bs], topology.ue_positions[ue])?,
            None => aux.random_range(0.0..2.0 * PI),
        };
        bs_boresights.push(bore);
    }

    // Serving-link PD of the plain nearest-BS association, kept as the
    // pre-protocol baseline.
    let mut baseline_pd = Vec::with_capacity(n_ue);
    for (ue, &bs) in initial_serving.iter().enumerate() {
        let toward_ue = azimuth(topology.bs_positions[bs], topology.ue_positions[ue])?;
        baseline_pd.push(incident_power_density(
            params,
            &ctx.bs_pattern(toward_ue),
            topology.bs_positions[bs],
            topology.ue_positions[ue],
            profile.bs_tx_power_w,
        )?);
    }

    step_uplink(&mut state, &topology, &ctx)?;

    let powers = vec![profile.bs_tx_power_w; n_bs];
    let mut ues = Vec::with_capacity(n_ue);
    for ue in 0..n_ue {
        let uplink_serving = state.serving_bs[ue];
        let (downlink_serving, downlink_outage) = match select_downlink(
            &topology,
            ue,
            &bs_boresights,
            &powers,
            &ctx,
            profile.downlink_rate_floor_bps,
        ) {
            Ok(sel) => {
                if sel.bs != uplink_serving {
                    let before = downlink_report_with_serving(
                        &topology,
                        ue,
                        uplink_serving,
                        &bs_boresights,
                        &powers,
                        &ctx,
                    )?
                    .sar_w_kg;
                    state.decision_log.push(HandoverDecision {
                        ue,
                        from_bs: uplink_serving,
                        to_bs: sel.bs,
                        cause: HandoverCause::DownlinkExposure,
                        predicted_sar_before_w_kg: before,
                        predicted_sar_after_w_kg: sel.sar_w_kg,
                        candidates_evaluated: sel.feasible_count,
                    });
                }
                (sel.bs, false)
            }
            // No BS meets the rate floor: stay attached, flag the outage.
            Err(Error::NoFeasibleBs) => (uplink_serving, true),
            Err(e) => return Err(e),
        };

        let downlink = downlink_report_with_serving(
            &topology,
            ue,
            downlink_serving,
            &bs_boresights,
            &powers,
            &ctx,
        )?;
        let toward_serving = azimuth(
            topology.ue_positions[ue],
            topology.bs_positions[uplink_serving],
        )?;
        let uplink = uplink_exposure(
            state.ue_tx_power_w[ue],
            &ctx.ue_pattern(toward_serving),
            topology.head_azimuth_rad[ue],
            settings.device_head_distance_m,
            &settings.tissue,
            params.carrier_hz,
            &settings.limits,
        )?;
        ues.push(UeOutcome {
            initial_serving_bs: initial_serving[ue],
            uplink_serving_bs: uplink_serving,
            downlink_serving_bs: downlink_serving,
            ue_tx_power_w: state.ue_tx_power_w[ue],
            triggered: state.trigger_active[ue],
            uplink_outage: state.uplink_outage[ue],
            downlink_outage,
            baseline_downlink_pd_w_m2: baseline_pd[ue],
            uplink,
            downlink,
        });
    }

    Ok(TrialRecord {
        trial_index: 0,
        seed: trial_seed,
        skipped: false,
        bs_count: n_bs,
        topology: Some(topology),
        bs_boresights,
        decisions: state.decision_log,
        ues,
    })
}

/// Sample mean and standard error (sample stddev / √n). Empty input gives
/// zeros; a single observation has zero standard error by convention.
fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Per-direction campaign statistics over per-trial means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionStats {
    pub mean_sar_w_kg: f64,
    pub stderr_sar_w_kg: f64,
    /// `1.96 · stderr`.
    pub sar_ci95_half_width_w_kg: f64,
    pub mean_pd_w_m2: f64,
    pub stderr_pd_w_m2: f64,
    pub pd_ci95_half_width_w_m2: f64,
}

fn direction_stats(sar: &[f64], pd: &[f64]) -> DirectionStats {
    let (mean_sar, stderr_sar) = mean_and_stderr(sar);
    let (mean_pd, stderr_pd) = mean_and_stderr(pd);
    DirectionStats {
        mean_sar_w_kg: mean_sar,
        stderr_sar_w_kg: stderr_sar,
        sar_ci95_half_width_w_kg: 1.96 * stderr_sar,
        mean_pd_w_m2: mean_pd,
        stderr_pd_w_m2: stderr_pd,
        pd_ci95_half_width_w_m2: 1.96 * stderr_pd,
    }
}

/// Aggregated campaign outcome for one technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyResult {
    pub technology: String,
    pub trials_run: usize,
    pub trials_skipped: usize,
    pub uplink: DirectionStats,
    pub downlink: DirectionStats,
    /// Mean nearest-BS serving-link PD before exposure-aware reselection.
    pub mean_baseline_downlink_pd_w_m2: f64,
    /// UEs whose uplink SAR fired the trigger.
    pub trigger_count: usize,
    /// Logged SAR-triggered uplink handovers.
    pub sar_handover_count: usize,
    /// Logged downlink serving reselections.
    pub downlink_reselect_count: usize,
    pub uplink_outage_count: usize,
    pub downlink_outage_count: usize,
    pub uplink_noncompliant_count: usize,
    pub downlink_noncompliant_count: usize,
}

/// Fold per-trial records into a [`TechnologyResult`]. Records are
/// consumed in trial order regardless of how they were computed, so the
/// statistics do not depend on execution parallelism.
pub fn aggregate(technology: &str, records: &[TrialRecord]) -> TechnologyResult {
    let mut up_sar = Vec::new();
    let mut up_pd = Vec::new();
    let mut dl_sar = Vec::new();
    let mut dl_pd = Vec::new();
    let mut base_pd = Vec::new();
    let mut trials_skipped = 0;
    let mut trigger_count = 0;
    let mut sar_handover_count = 0;
    let mut downlink_reselect_count = 0;
    let mut uplink_outage_count = 0;
    let mut downlink_outage_count = 0;
    let mut uplink_noncompliant_count = 0;
    let mut downlink_noncompliant_count = 0;
    for rec in records {
        if rec.skipped {
            trials_skipped += 1;
            continue;
        }
        let k = rec.ues.len() as f64;
        up_sar.push(rec.ues.iter().map(|u| u.uplink.sar_w_kg).sum::<f64>() / k);
        up_pd.push(
            rec.ues
                .iter()
                .map(|u| u.uplink.incident_pd_w_m2)
                .sum::<f64>()
                / k,
        );
        dl_sar.push(rec.ues.iter().map(|u| u.downlink.sar_w_kg).sum::<f64>() / k);
        dl_pd.push(
            rec.ues
                .iter()
                .map(|u| u.downlink.incident_pd_w_m2)
                .sum::<f64>()
                / k,
        );
        base_pd.push(
            rec.ues
                .iter()
                .map(|u| u.baseline_downlink_pd_w_m2)
                .sum::<f64>()
                / k,
        );
        for ue in &rec.ues {
            trigger_count += usize::from(ue.triggered);
            uplink_outage_count += usize::from(ue.uplink_outage);
            downlink_outage_count += usize::from(ue.downlink_outage);
            uplink_noncompliant_count += usize::from(!ue.uplink.compliant);
            downlink_noncompliant_count += usize::from(!ue.downlink.compliant);
        }
        for d in &rec.decisions {
            match d.cause {
                HandoverCause::SarTrigger => sar_handover_count += 1,
                HandoverCause::DownlinkExposure => downlink_reselect_count += 1,
                HandoverCause::Initial => {}
            }
        }
    }
    TechnologyResult {
        technology: technology.to_string(),
        trials_run: records.len() - trials_skipped,
        trials_skipped,
        uplink: direction_stats(&up_sar, &up_pd),
        downlink: direction_stats(&dl_sar, &dl_pd),
        mean_baseline_downlink_pd_w_m2: mean_and_stderr(&base_pd).0,
        trigger_count,
        sar_handover_count,
        downlink_reselect_count,
        uplink_outage_count,
        downlink_outage_count,
        uplink_noncompliant_count,
        downlink_noncompliant_count,
    }
}

/// Campaign-level aggregate across technologies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub master_seed: u64,
    pub trials_requested: usize,
    pub technologies: Vec<TechnologyResult>,
}

/// Per-technology trial records, grouped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechnologyTrials {
    pub technology: String,
    pub records: Vec<TrialRecord>,
}

/// A finished campaign: aggregate result plus everything it was computed
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutput {
    pub result: CampaignResult,
    pub trials: Vec<TechnologyTrials>,
}

#[cfg(feature = "parallel")]
fn run_indexed<T, F>(parallelism: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    match parallelism {
        1 => (0..n).map(f).collect(),
        0 => (0..n).into_par_iter().map(f).collect(),
        k => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("parallelism: {e}")))?
            .install(|| (0..n).into_par_iter().map(f).collect()),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_indexed<T, F>(_parallelism: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Run `trials` seeded trials of every profile.
///
/// Trial `i` uses seed `derive_seed(master_seed, i)` for every technology
/// (common random numbers across profiles). `parallelism` 0 uses all
/// cores, 1 runs sequentially, `k` uses a dedicated `k`-thread pool;
/// records land in trial order and aggregation is sequential either way,
/// so the output is byte-identical across all settings. Without the
/// `parallel` feature every value runs sequentially.
pub fn run_campaign(
    profiles: &[TechnologyProfile],
    settings: &SimulationSettings,
    trials: usize,
    master_seed: u64,
    parallelism: usize,
) -> Result<CampaignOutput> {
    if profiles.is_empty() {
        return Err(Error::Config(
            "scenarios: need at least one technology".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::Config("trials: must be >= 1".into()));
    }
    settings.validate()?;
    for (i, profile) in profiles.iter().enumerate() {
        profile.validate()?;
        if profiles[..i].iter().any(|p| p.name == profile.name) {
            return Err(Error::Config(format!(
                "scenarios: duplicate name `{}`",
                profile.name
            )));
        }
    }
    let mut technologies = Vec::with_capacity(profiles.len());
    let mut trial_sets = Vec::with_capacity(profiles.len());
    for profile in profiles {
        let records = run_indexed(parallelism, trials, |i| {
            let seed = derive_seed(master_seed, i as u64);
            match run_trial(profile, settings, seed) {
                Ok(mut rec) => {
                    rec.trial_index = i;
                    Ok(rec)
                }
                Err(Error::EmptyDeployment { .. }) => Ok(TrialRecord::skipped(i, seed)),
                Err(e) => Err(e),
            }
        })?;
        technologies.push(aggregate(&profile.name, &records));
        trial_sets.push(TechnologyTrials {
            technology: profile.name.clone(),
            records,
        });
    }
    Ok(CampaignOutput {
        result: CampaignResult {
            master_seed,
            trials_requested: trials,
            technologies,
        },
        trials: trial_sets,
    })
}

/// One row of a ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTechnology {
    pub technology: String,
    pub mean_sar_w_kg: f64,
    pub ci95_half_width_w_kg: f64,
    /// True when this row's 95% interval clears the next row's entirely.
    pub separated_from_next: bool,
}

/// Technologies ranked by mean SAR, per direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub uplink: Vec<RankedTechnology>,
    pub downlink: Vec<RankedTechnology>,
}

/// Rank technologies by mean SAR (descending) in each direction and mark
/// which adjacent pairs are separated beyond both confidence intervals.
pub fn compare(result: &CampaignResult) -> ComparisonSummary {
    fn rank(
        result: &CampaignResult,
        stats: impl Fn(&TechnologyResult) -> &DirectionStats,
    ) -> Vec<RankedTechnology> {
        let mut rows: Vec<RankedTechnology> = result
            .technologies
            .iter()
            .map(|t| {
                let s = stats(t);
                RankedTechnology {
                    technology: t.technology.clone(),
                    mean_sar_w_kg: s.mean_sar_w_kg,
                    ci95_half_width_w_kg: s.sar_ci95_half_width_w_kg,
                    separated_from_next: false,
                }
            })
            .collect();
        rows.sort_by(|a, b| {
            b.mean_sar_w_kg
                .total_cmp(&a.mean_sar_w_kg)
                .then_with(|| a.technology.cmp(&b.technology))
        });
        for i in 0..rows.len().saturating_sub(1) {
            rows[i].separated_from_next = rows[i].mean_sar_w_kg - rows[i].ci95_half_width_w_kg
                > rows[i + 1].mean_sar_w_kg + rows[i + 1].ci95_half_width_w_kg;
        }
        rows
    }
    ComparisonSummary {
        uplink: rank(result, |t| &t.uplink),
        downlink: rank(result, |t| &t.downlink),
    }
}
