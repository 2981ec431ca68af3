//! Exposure-aware association: when an uplink transmission violates the
//! SAR trigger, the UE is not power-backed-off — it is handed over to the
//! base station with the least emission toward the user. Downlink serving
//! is chosen the same way: among rate-feasible BSs, serve from the one
//! whose beam minimizes the user's total incident exposure.

use serde::{Deserialize, Serialize};

use crate::dosimetry::{
    device_head_pd, downlink_exposure, ExposureLimits, SarConverter, TissueModel,
};
use crate::engine::TechnologyProfile;
use crate::radio::{
    achievable_rate, link_budget, pathloss_db, uplink_power_control, AntennaPattern,
};
use crate::topology::{azimuth, Topology};
use crate::{Error, Result};

/// Why an association changed (or was recorded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandoverCause {
    /// First attachment of the trial (nearest BS).
    Initial,
    /// Uplink SAR exceeded the trigger; reassociated to least emission.
    SarTrigger,
    /// Downlink serving moved to the least-exposure feasible BS.
    DownlinkExposure,
}

/// One recorded (re)association.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverDecision {
    pub ue: usize,
    pub from_bs: usize,
    pub to_bs: usize,
    pub cause: HandoverCause,
    /// Exposure metric on `from_bs` when the decision was made (W/kg).
    pub predicted_sar_before_w_kg: f64,
    /// Exposure metric on `to_bs` (W/kg).
    pub predicted_sar_after_w_kg: f64,
    /// Size of the comparison set the decision was taken over.
    pub candidates_evaluated: usize,
}

/// Per-UE association bookkeeping across protocol steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationState {
    pub serving_bs: Vec<usize>,
    /// Power-controlled uplink transmit power toward the serving BS (W).
    pub ue_tx_power_w: Vec<f64>,
    /// True for UEs whose uplink SAR exceeded the trigger in the last step
    /// (it stays true after the handover — the trigger did fire).
    pub trigger_active: Vec<bool>,
    /// True for UEs that fired the trigger but had no feasible candidate.
    pub uplink_outage: Vec<bool>,
    pub decision_log: Vec<HandoverDecision>,
}

/// Everything the protocol evaluates links against, precomputed once per
/// trial: profile, tissue response at the carrier, and head geometry.
#[derive(Debug, Clone)]
pub struct ProtocolContext<'a> {
    pub profile: &'a TechnologyProfile,
    pub tissue: &'a TissueModel,
    pub limits: &'a ExposureLimits,
    pub device_head_distance_m: f64,
    /// Hysteresis margin on the trigger: the protocol reacts above
    /// `sar_trigger_w_kg · (1 + margin)`.
    pub sar_trigger_margin: f64,
    converter: SarConverter,
    ue_base: AntennaPattern,
    bs_base: AntennaPattern,
}

impl<'a> ProtocolContext<'a> {
    pub fn new(
        profile: &'a TechnologyProfile,
        tissue: &'a TissueModel,
        limits: &'a ExposureLimits,
        device_head_distance_m: f64,
        sar_trigger_margin: f64,
    ) -> Result<Self> {
        profile.validate()?;
        tissue.validate()?;
        limits.validate()?;
        if !(device_head_distance_m > 0.0 && device_head_distance_m.is_finite()) {
            return Err(Error::InvalidDistance(device_head_distance_m));
        }
        if !(sar_trigger_margin >= 0.0 && sar_trigger_margin.is_finite()) {
            return Err(Error::Config(format!(
                "sar_trigger_margin: must be finite and >= 0 (got {sar_trigger_margin})"
            )));
        }
        Ok(Self {
            profile,
            tissue,
            limits,
            device_head_distance_m,
            sar_trigger_margin,
            converter: SarConverter::new(tissue, profile.radio.carrier_hz)?,
            ue_base: AntennaPattern::sectored(profile.ue_elements, profile.side_gain, 0.0)?,
            bs_base: AntennaPattern::sectored(profile.bs_elements, profile.side_gain, 0.0)?,
        })
    }

    /// SAR level above which the protocol reacts (W/kg).
    pub fn trigger_threshold_w_kg(&self) -> f64 {
        self.limits.sar_trigger_w_kg * (1.0 + self.sar_trigger_margin)
    }

    pub fn sar_converter(&self) -> &SarConverter {
        &self.converter
    }

    pub fn ue_pattern(&self, boresight_rad: f64) -> AntennaPattern {
        self.ue_base.steered(boresight_rad)
    }

    pub fn bs_pattern(&self, boresight_rad: f64) -> AntennaPattern {
        self.bs_base.steered(boresight_rad)
    }

    pub fn ue_main_gain(&self) -> f64 {
        self.ue_base.main_gain
    }

    pub fn bs_main_gain(&self) -> f64 {
        self.bs_base.main_gain
    }
}

fn bs_position(topology: &Topology, bs: usize) -> Result<crate::topology::Point2D> {
    topology.bs_positions.get(bs).copied().ok_or_else(|| {
        Error::Config(format!(
            "bs: index {bs} out of range ({} BSs)",
            topology.bs_positions.len()
        ))
    })
}

fn ue_position(topology: &Topology, ue: usize) -> Result<crate::topology::Point2D> {
    topology.ue_positions.get(ue).copied().ok_or_else(|| {
        Error::Config(format!(
            "ue: index {ue} out of range ({} UEs)",
            topology.ue_positions.len()
        ))
    })
}

/// Power-controlled uplink transmit power of `ue` toward `bs`, assuming
/// both ends aim their main lobes along the link.
pub fn uplink_power_toward(
    topology: &Topology,
    ue: usize,
    bs: usize,
    ctx: &ProtocolContext,
) -> Result<f64> {
    let params = &ctx.profile.radio;
    let d = ue_position(topology, ue)?.distance(bs_position(topology, bs)?);
    let pl_db = pathloss_db(params, params.effective_distance(d))?;
    Ok(uplink_power_control(
        params,
        pl_db,
        ctx.ue_main_gain(),
        ctx.bs_main_gain(),
    ))
}

/// Predicted uplink SAR at the user's head if `ue` were served by `bs`:
/// power control toward `bs`, device boresight along the link, head gain
/// read off the steered pattern.
pub fn predicted_uplink_emission(
    topology: &Topology,
    ue: usize,
    bs: usize,
    ctx: &ProtocolContext,
) -> Result<f64> {
    let ue_pos = ue_position(topology, ue)?;
    let bs_pos = bs_position(topology, bs)?;
    let power = uplink_power_toward(topology, ue, bs, ctx)?;
    let device = ctx.ue_pattern(azimuth(ue_pos, bs_pos)?);
    let pd = device_head_pd(
        power,
        &device,
        topology.head_azimuth_rad[ue],
        ctx.device_head_distance_m,
    );
    Ok(ctx.converter.convert(pd))
}

/// BSs that can hear `ue` at or above `snr_floor` given power-controlled
/// (cap-clamped) uplink power, sorted by distance, then by index.
pub fn candidate_set(
    topology: &Topology,
    ue: usize,
    profile: &TechnologyProfile,
    snr_floor: f64,
) -> Result<Vec<usize>> {
    let params = &profile.radio;
    let ue_pos = ue_position(topology, ue)?;
    let noise = params.noise_power_w();
    let tx_gain = AntennaPattern::sectored_main_gain(profile.ue_elements, profile.side_gain);
    let rx_gain = AntennaPattern::sectored_main_gain(profile.bs_elements, profile.side_gain);
    let mut keep: Vec<(f64, usize)> = Vec::new();
    for (bs, &bs_pos) in topology.bs_positions.iter().enumerate() {
        let d = ue_pos.distance(bs_pos);
        let pl_db = pathloss_db(params, params.effective_distance(d))?;
        let power = uplink_power_control(params, pl_db, tx_gain, rx_gain);
        let snr = power * tx_gain * rx_gain / (crate::radio::linear_from_db(pl_db) * noise);
        if snr >= snr_floor {
            keep.push((d, bs));
        }
    }
    keep.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(keep.into_iter().map(|(_, bs)| bs).collect())
}

/// A minimum-emission pick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionChoice {
    pub bs: usize,
    pub emission_w_kg: f64,
}

/// The candidate with the least predicted uplink emission toward the user.
/// Exact ties resolve to the lower BS index; an empty candidate list is
/// a [`Error::NoFeasibleBs`].
pub fn select_min_emission(
    topology: &Topology,
    ue: usize,
    candidates: &[usize],
    ctx: &ProtocolContext,
) -> Result<EmissionChoice> {
    let mut best: Option<EmissionChoice> = None;
    for &bs in candidates {
        let emission_w_kg = predicted_uplink_emission(topology, ue, bs, ctx)?;
        let better = match best {
            None => true,
            Some(cur) => {
                emission_w_kg < cur.emission_w_kg
                    || (emission_w_kg == cur.emission_w_kg && bs < cur.bs)
            }
        };
        if better {
            best = Some(EmissionChoice { bs, emission_w_kg });
        }
    }
    best.ok_or(Error::NoFeasibleBs)
}

/// Attach every UE to its nearest BS (ties to the lower index), set
/// power-controlled uplink powers, and log the initial decisions.
pub fn initial_association(topology: &Topology, ctx: &ProtocolContext) -> Result<AssociationState> {
    let n_ue = topology.ue_positions.len();
    let mut state = AssociationState {
        serving_bs: Vec::with_capacity(n_ue),
        ue_tx_power_w: Vec::with_capacity(n_ue),
        trigger_active: vec![false; n_ue],
        uplink_outage: vec![false; n_ue],
        decision_log: Vec::with_capacity(n_ue),
    };
    for ue in 0..n_ue {
        let ue_pos = topology.ue_positions[ue];
        let nearest = topology
            .bs_positions
            .iter()
            .enumerate()
            .min_by(|a, b| ue_pos.distance(*a.1).total_cmp(&ue_pos.distance(*b.1)))
            .map(|(bs, _)| bs)
            .expect("topology invariant: at least one BS");
        let power = uplink_power_toward(topology, ue, nearest, ctx)?;
        let sar = predicted_uplink_emission(topology, ue, nearest, ctx)?;
        state.serving_bs.push(nearest);
        state.ue_tx_power_w.push(power);
        state.decision_log.push(HandoverDecision {
            ue,
            from_bs: nearest,
            to_bs: nearest,
            cause: HandoverCause::Initial,
            predicted_sar_before_w_kg: sar,
            predicted_sar_after_w_kg: sar,
            candidates_evaluated: topology.bs_positions.len(),
        });
    }
    Ok(state)
}

/// One protocol pass over every UE: where the predicted uplink SAR exceeds
/// the trigger, reassociate to the least-emission candidate.
///
/// The serving BS always participates in the comparison (it is appended
/// when the SNR floor excluded it), so every logged handover strictly
/// improves: `predicted_sar_after <= predicted_sar_before`. A UE whose
/// serving BS already is the argmin keeps it — no handover is logged, the
/// violation simply persists into the exposure report. A triggered UE with
/// no feasible candidate at all is flagged as uplink outage and stays
/// attached. The pass is idempotent: repeating it logs nothing new.
///
/// Returns the decisions this pass appended to `state.decision_log`.
pub fn step_uplink(
    state: &mut AssociationState,
    topology: &Topology,
    ctx: &ProtocolContext,
) -> Result<Vec<HandoverDecision>> {
    let threshold = ctx.trigger_threshold_w_kg();
    let mut appended = Vec::new();
    for ue in 0..topology.ue_positions.len() {
        let serving = state.serving_bs[ue];
        let current = predicted_uplink_emission(topology, ue, serving, ctx)?;
        let fired = current > threshold;
        state.trigger_active[ue] = fired;
        if !fired {
            state.uplink_outage[ue] = false;
            continue;
        }
        let mut candidates =
            candidate_set(topology, ue, ctx.profile, ctx.profile.uplink_snr_floor)?;
        if candidates.is_empty() {
            state.uplink_outage[ue] = true;
            continue;
        }
        state.uplink_outage[ue] = false;
        if !candidates.contains(&serving) {
            candidates.push(serving);
        }
        let choice = select_min_emission(topology, ue, &candidates, ctx)?;
        if choice.bs == serving {
            continue;
        }
        let decision = HandoverDecision {
            ue,
            from_bs: serving,
            to_bs: choice.bs,
            cause: HandoverCause::SarTrigger,
            predicted_sar_before_w_kg: current,
            predicted_sar_after_w_kg: choice.emission_w_kg,
            candidates_evaluated: candidates.len(),
        };
        state.serving_bs[ue] = choice.bs;
        state.ue_tx_power_w[ue] = uplink_power_toward(topology, ue, choice.bs, ctx)?;
        state.decision_log.push(decision.clone());
        appended.push(decision);
    }
    Ok(appended)
}

/// Outcome of a downlink serving-BS selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkSelection {
    pub bs: usize,
    /// Total downlink SAR with `bs` serving (its beam on the UE, every
    /// other BS on its assigned boresight).
    pub sar_w_kg: f64,
    /// How many BSs met the rate floor.
    pub feasible_count: usize,
}

/// Choose the downlink serving BS for `ue`: among BSs that reach
/// `rate_floor` when beamforming at the UE with their current power, pick
/// the one minimizing the user's total downlink SAR (serving beam on the
/// UE, interferers on their `boresights`). Exact SAR ties resolve to the
/// lower index. Silent BSs (zero power) are never feasible; if nothing is,
/// the selection is a [`Error::NoFeasibleBs`].
pub fn select_downlink(
    topology: &Topology,
    ue: usize,
    boresights: &[f64],
    powers: &[f64],
    ctx: &ProtocolContext,
    rate_floor_bps: f64,
) -> Result<DownlinkSelection> {
    let n = topology.bs_positions.len();
    if boresights.len() != n || powers.len() != n {
        return Err(Error::Config(format!(
            "boresights/powers: need one entry per BS ({} BSs, {} boresights, {} powers)",
            n,
            boresights.len(),
            powers.len()
        )));
    }
    let ue_pos = ue_position(topology, ue)?;
    let params = &ctx.profile.radio;
    let mut scene: Vec<AntennaPattern> = boresights.iter().map(|&b| ctx.bs_pattern(b)).collect();
    let mut feasible_count = 0;
    let mut best: Option<DownlinkSelection> = None;
    for bs in 0..n {
        if powers[bs] <= 0.0 {
            continue;
        }
        let bs_pos = topology.bs_positions[bs];
        let toward_ue = azimuth(bs_pos, ue_pos)?;
        let toward_bs = azimuth(ue_pos, bs_pos)?;
        let lb = link_budget(
            params,
            &ctx.bs_pattern(toward_ue),
            &ctx.ue_pattern(toward_bs),
            bs_pos,
            ue_pos,
            powers[bs],
        )?;
        if achievable_rate(lb.snr, params.bandwidth_hz) < rate_floor_bps {
            continue;
        }
        feasible_count += 1;
        let parked = scene[bs];
        scene[bs] = ctx.bs_pattern(toward_ue);
        let report =
            downlink_exposure(topology, &scene, powers, params, ue, ctx.tissue, ctx.limits)?;
        scene[bs] = parked;
        // Ascending index + strict improvement = lower index wins ties.
        if best.is_none_or(|cur| report.sar_w_kg < cur.sar_w_kg) {
            best = Some(DownlinkSelection {
                bs,
                sar_w_kg: report.sar_w_kg,
                feasible_count: 0,
            });
        }
    }
    best.map(|mut sel| {
        sel.feasible_count = feasible_count;
        sel
    })
    .ok_or(Error::NoFeasibleBs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::preset;
    use crate::topology::Point2D;
    use approx::assert_relative_eq;

    fn p(x: f64, y: f64) -> Point2D {
        Point2D::new(x, y)
    }

    /// UE at the origin with its head toward +x; BS0 near on +x, BS1
    /// farther on +y.
    fn scene() -> Topology {
        Topology {
            bs_positions: vec![p(100.0, 0.0), p(0.0, 200.0)],
            ue_positions: vec![p(0.0, 0.0)],
            head_azimuth_rad: vec![0.0],
            seed_used: 0,
        }
    }

    fn profile() -> TechnologyProfile {
        let mut profile = preset("4G").unwrap();
        profile.ue_elements = 8; // give the device a real beam
        profile
    }

    fn fixtures() -> (TechnologyProfile, TissueModel, ExposureLimits) {
        (
            profile(),
            TissueModel::default_skin(),
            ExposureLimits {
                pd_limit_w_m2: 10.0,
                sar_limit_w_kg: 1.6,
                sar_trigger_w_kg: 1.6,
            },
        )
    }

    #[test]
    fn candidate_set_sorts_by_distance_then_index() {
        let (profile, ..) = fixtures();
        let mut topo = scene();
        topo.bs_positions.push(p(0.0, 200.0)); // duplicate distance, higher id
        let cands = candidate_set(&topo, 0, &profile, 0.0).unwrap();
        assert_eq!(cands, vec![0, 1, 2]);
    }

    #[test]
    fn candidate_set_applies_the_snr_floor() {
        let (profile, ..) = fixtures();
        let topo = scene();
        // Unclamped power control pins SNR at target/noise = 10 for every
        // reachable BS (up to rounding); a floor above that empties the set.
        let all = candidate_set(&topo, 0, &profile, 10.0 * (1.0 - 1e-9)).unwrap();
        assert_eq!(all, vec![0, 1]);
        let none = candidate_set(&topo, 0, &profile, 10.0 * (1.0 + 1e-9)).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn emission_prefers_the_bs_away_from_the_head() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let toward_head = predicted_uplink_emission(&topo, 0, 0, &ctx).unwrap();
        let away = predicted_uplink_emission(&topo, 0, 1, &ctx).unwrap();
        // BS0: main lobe into the head. BS1: 4x the power (double distance,
        // n = 2) through a side lobe — 73x less gain wins.
        assert!(away < toward_head);
        assert_relative_eq!(
            toward_head / away,
            ctx.ue_main_gain() / (4.0 * profile.side_gain),
            max_relative = 1e-9
        );
        let choice = select_min_emission(&topo, 0, &[0, 1], &ctx).unwrap();
        assert_eq!(choice.bs, 1);
        assert_eq!(choice.emission_w_kg, away);
    }

    #[test]
    fn select_min_emission_matches_brute_force_and_breaks_ties_low() {
        let (profile, tissue, limits) = fixtures();
        let mut topo = scene();
        topo.bs_positions.push(p(0.0, 200.0)); // exact tie with BS1
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let cands = vec![0, 1, 2];
        let choice = select_min_emission(&topo, 0, &cands, &ctx).unwrap();
        let brute = cands
            .iter()
            .map(|&bs| (bs, predicted_uplink_emission(&topo, 0, bs, &ctx).unwrap()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .unwrap();
        assert_eq!(choice.bs, brute.0);
        assert_eq!(
            choice.bs, 1,
            "equal emissions must resolve to the lower index"
        );
        assert!(select_min_emission(&topo, 0, &[], &ctx)
            .unwrap_err()
            .to_string()
            .starts_with("no feasible BS"));
    }

    #[test]
    fn initial_association_is_nearest_with_power_control() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let state = initial_association(&topo, &ctx).unwrap();
        assert_eq!(state.serving_bs, vec![0]);
        assert_eq!(
            state.ue_tx_power_w[0],
            uplink_power_toward(&topo, 0, 0, &ctx).unwrap()
        );
        assert_eq!(state.decision_log.len(), 1);
        let d = &state.decision_log[0];
        assert_eq!(d.cause, HandoverCause::Initial);
        assert_eq!((d.from_bs, d.to_bs), (0, 0));
        assert_eq!(d.predicted_sar_before_w_kg, d.predicted_sar_after_w_kg);
        assert_eq!(d.candidates_evaluated, 2);
    }

    fn tiny_trigger() -> ExposureLimits {
        ExposureLimits {
            pd_limit_w_m2: 10.0,
            sar_limit_w_kg: 1.6,
            sar_trigger_w_kg: 1e-12,
        }
    }

    #[test]
    fn sar_trigger_hands_over_to_min_emission() {
        let (profile, tissue, _) = fixtures();
        let limits = tiny_trigger();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let mut state = initial_association(&topo, &ctx).unwrap();
        let decisions = step_uplink(&mut state, &topo, &ctx).unwrap();
        assert_eq!(decisions.len(), 1);
        let d = &decisions[0];
        assert_eq!(d.cause, HandoverCause::SarTrigger);
        assert_eq!((d.from_bs, d.to_bs), (0, 1));
        assert!(d.predicted_sar_after_w_kg <= d.predicted_sar_before_w_kg);
        assert_eq!(d.candidates_evaluated, 2);
        assert_eq!(state.serving_bs[0], 1);
        assert_eq!(
            state.ue_tx_power_w[0],
            uplink_power_toward(&topo, 0, 1, &ctx).unwrap()
        );
        assert!(state.trigger_active[0]);
        assert!(!state.uplink_outage[0]);
        // The state now reflects the logged prediction exactly.
        assert_eq!(
            predicted_uplink_emission(&topo, 0, 1, &ctx).unwrap(),
            d.predicted_sar_after_w_kg
        );
    }

    #[test]
    fn step_uplink_is_idempotent() {
        let (profile, tissue, _) = fixtures();
        let limits = tiny_trigger();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let mut state = initial_association(&topo, &ctx).unwrap();
        step_uplink(&mut state, &topo, &ctx).unwrap();
        let snapshot = state.clone();
        let again = step_uplink(&mut state, &topo, &ctx).unwrap();
        assert!(again.is_empty());
        assert_eq!(state, snapshot);
    }

    #[test]
    fn no_trigger_means_no_decisions() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let mut state = initial_association(&topo, &ctx).unwrap();
        // 4G at 100 m runs far below a 1.6 W/kg trigger.
        let decisions = step_uplink(&mut state, &topo, &ctx).unwrap();
        assert!(decisions.is_empty());
        assert!(!state.trigger_active[0]);
        assert_eq!(state.serving_bs, vec![0]);
    }

    #[test]
    fn trigger_with_no_candidates_is_an_outage() {
        let (mut profile, tissue, _) = fixtures();
        profile.uplink_snr_floor = 1e12; // nothing can satisfy this
        let limits = tiny_trigger();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let mut state = initial_association(&topo, &ctx).unwrap();
        let decisions = step_uplink(&mut state, &topo, &ctx).unwrap();
        assert!(decisions.is_empty());
        assert!(state.uplink_outage[0]);
        assert!(state.trigger_active[0]);
        assert_eq!(state.serving_bs, vec![0], "outage keeps the UE attached");
    }

    #[test]
    fn serving_already_argmin_logs_nothing_but_stays_flagged() {
        let (profile, tissue, _) = fixtures();
        let limits = tiny_trigger();
        let mut topo = scene();
        topo.head_azimuth_rad = vec![std::f64::consts::PI]; // head away from both BSs
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let mut state = initial_association(&topo, &ctx).unwrap();
        // Both links see the head through the same side lobe; the nearer
        // BS needs less power, so serving is already the argmin.
        let decisions = step_uplink(&mut state, &topo, &ctx).unwrap();
        assert!(decisions.is_empty());
        assert!(state.trigger_active[0]);
        assert_eq!(state.serving_bs, vec![0]);
    }

    #[test]
    fn hysteresis_margin_raises_the_trigger() {
        let (profile, tissue, limits) = fixtures();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.25).unwrap();
        assert_relative_eq!(ctx.trigger_threshold_w_kg(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn downlink_selection_degenerate_single_powered_bs() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let sel = select_downlink(&topo, 0, &[0.0, 0.0], &[0.0, 10.0], &ctx, 0.0).unwrap();
        assert_eq!(sel.bs, 1, "the only powered BS must serve");
        assert_eq!(sel.feasible_count, 1);
        let err = select_downlink(&topo, 0, &[0.0, 0.0], &[0.0, 0.0], &ctx, 0.0).unwrap_err();
        assert!(err.to_string().starts_with("no feasible BS"));
    }

    #[test]
    fn downlink_selection_minimizes_total_sar() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let boresights = vec![0.0, 0.0];
        let powers = vec![10.0, 10.0];
        let sel = select_downlink(&topo, 0, &boresights, &powers, &ctx, 0.0).unwrap();
        // Brute force over both candidates.
        let mut sars = Vec::new();
        for bs in 0..2 {
            let mut scene: Vec<AntennaPattern> =
                boresights.iter().map(|&b| ctx.bs_pattern(b)).collect();
            scene[bs] =
                ctx.bs_pattern(azimuth(topo.bs_positions[bs], topo.ue_positions[0]).unwrap());
            let report =
                downlink_exposure(&topo, &scene, &powers, &profile.radio, 0, &tissue, &limits)
                    .unwrap();
            sars.push(report.sar_w_kg);
        }
        assert_eq!(sel.feasible_count, 2);
        assert_eq!(sel.bs, if sars[0] <= sars[1] { 0 } else { 1 });
        assert_eq!(sel.sar_w_kg, sars[sel.bs]);
        // The farther BS serves: its main lobe arrives weaker.
        assert_eq!(sel.bs, 1);
    }

    #[test]
    fn downlink_rate_floor_excludes_weak_bs() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        // Rates at 100 m vs 200 m differ; pick a floor between them.
        let rate_at = |bs: usize| {
            let lb = link_budget(
                &profile.radio,
                &ctx.bs_pattern(azimuth(topo.bs_positions[bs], topo.ue_positions[0]).unwrap()),
                &ctx.ue_pattern(azimuth(topo.ue_positions[0], topo.bs_positions[bs]).unwrap()),
                topo.bs_positions[bs],
                topo.ue_positions[0],
                10.0,
            )
            .unwrap();
            achievable_rate(lb.snr, profile.radio.bandwidth_hz)
        };
        let (near, far) = (rate_at(0), rate_at(1));
        assert!(near > far);
        let floor = (near + far) / 2.0;
        let sel = select_downlink(&topo, 0, &[0.0, 0.0], &[10.0, 10.0], &ctx, floor).unwrap();
        assert_eq!(sel.bs, 0, "only the near BS meets the floor");
        assert_eq!(sel.feasible_count, 1);
    }

    #[test]
    fn downlink_selection_validates_shapes() {
        let (profile, tissue, limits) = fixtures();
        let topo = scene();
        let ctx = ProtocolContext::new(&profile, &tissue, &limits, 0.05, 0.0).unwrap();
        let err = select_downlink(&topo, 0, &[0.0], &[10.0, 10.0], &ctx, 0.0).unwrap_err();
        assert!(err.to_string().contains("one entry per BS"));
    }
}
