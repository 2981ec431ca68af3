//! End-to-end orchestration: a config in, artifacts on disk out — and the
//! `explain` path, which re-derives one UE's story from the same seeds so
//! its numbers match the run record bit for bit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::engine::{compare, run_campaign, run_trial, TechnologyProfile, UeOutcome};
use crate::protocol::{HandoverCause, HandoverDecision};
use crate::record::{figure1_csv, summary_csv, RunRecord};
use crate::seed::derive_seed;
use crate::{Error, Result};

/// Artifact locations and the record they were written from.
#[derive(Debug)]
pub struct RunOutputs {
    pub record: RunRecord,
    pub summary_csv_path: PathBuf,
    pub figure1_csv_path: PathBuf,
    pub run_record_path: PathBuf,
}

/// Run the configured campaign and write `summary.csv`,
/// `figure1_data.csv`, and `run_record.json` into the output directory.
pub fn run(config: &RunConfig) -> Result<RunOutputs> {
    let (profiles, settings) = config.build()?;
    let output = run_campaign(
        &profiles,
        &settings,
        config.trials,
        config.master_seed,
        config.parallelism,
    )?;
    let comparison = compare(&output.result);
    let summary = summary_csv(&output.result);
    let figure1 = figure1_csv(&output.result);
    let record = RunRecord::new(config.clone(), output, comparison, config.record_level);

    let dir = Path::new(&config.output_dir);
    std::fs::create_dir_all(dir)?;
    let summary_csv_path = dir.join("summary.csv");
    let figure1_csv_path = dir.join("figure1_data.csv");
    let run_record_path = dir.join("run_record.json");
    std::fs::write(&summary_csv_path, summary)?;
    std::fs::write(&figure1_csv_path, figure1)?;
    let mut json = serde_json::to_string_pretty(&record)?;
    json.push('\n');
    std::fs::write(&run_record_path, json)?;

    Ok(RunOutputs {
        record,
        summary_csv_path,
        figure1_csv_path,
        run_record_path,
    })
}

/// One UE's trial, unpacked for inspection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplainReport {
    pub technology: String,
    pub trial_index: usize,
    pub trial_seed: u64,
    pub ue: usize,
    pub bs_count: usize,
    pub window_m: (f64, f64),
    pub trigger_threshold_w_kg: f64,
    pub sar_limit_w_kg: f64,
    pub pd_limit_w_m2: f64,
    pub initial_distance_m: f64,
    pub uplink_serving_distance_m: f64,
    pub outcome: UeOutcome,
    /// This UE's decision-log entries, in the order they were taken.
    pub decisions: Vec<HandoverDecision>,
}

fn select_profile<'a>(
    profiles: &'a [TechnologyProfile],
    technology: Option<&str>,
) -> Result<&'a TechnologyProfile> {
    match technology {
        None => Ok(&profiles[0]),
        Some(name) => profiles
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownTechnology(name.to_string())),
    }
}

/// Recompute trial `trial_index` of `technology` (default: the first
/// scenario) and report UE `ue_index`. Uses the same seed derivation as
/// [`run`], so every value agrees with the run record.
pub fn explain_report(
    config: &RunConfig,
    technology: Option<&str>,
    trial_index: usize,
    ue_index: usize,
) -> Result<ExplainReport> {
    let (profiles, settings) = config.build()?;
    let profile = select_profile(&profiles, technology)?;
    if trial_index >= config.trials {
        return Err(Error::Config(format!(
            "trial: index {trial_index} out of range (campaign has trials 0..{})",
            config.trials
        )));
    }
    if ue_index >= settings.ue_count {
        return Err(Error::Config(format!(
            "ue: index {ue_index} out of range (trials place UEs 0..{})",
            settings.ue_count
        )));
    }
    let trial_seed = derive_seed(config.master_seed, trial_index as u64);
    let mut rec = run_trial(profile, &settings, trial_seed)?;
    rec.trial_index = trial_index;
    let topology = rec
        .topology
        .as_ref()
        .expect("non-skipped trial keeps its topology");
    let outcome = rec.ues[ue_index].clone();
    let ue_pos = topology.ue_positions[ue_index];
    let initial_distance_m = ue_pos.distance(topology.bs_positions[outcome.initial_serving_bs]);
    let uplink_serving_distance_m =
        ue_pos.distance(topology.bs_positions[outcome.uplink_serving_bs]);
    Ok(ExplainReport {
        technology: profile.name.clone(),
        trial_index,
        trial_seed,
        ue: ue_index,
        bs_count: rec.bs_count,
        window_m: settings.window_m,
        trigger_threshold_w_kg: settings.limits.sar_trigger_w_kg
            * (1.0 + settings.sar_trigger_margin),
        sar_limit_w_kg: settings.limits.sar_limit_w_kg,
        pd_limit_w_m2: settings.limits.pd_limit_w_m2,
        initial_distance_m,
        uplink_serving_distance_m,
        outcome,
        decisions: rec
            .decisions
            .into_iter()
            .filter(|d| d.ue == ue_index)
            .collect(),
    })
}

/// Render an [`ExplainReport`] as terminal text.
pub fn render_explain(report: &ExplainReport) -> String {
    let mut out = String::new();
    let o = &report.outcome;
    writeln!(
        out,
        "{} trial {} (seed {:#018x}), UE {} of a {:.0} m x {:.0} m window with {} BSs",
        report.technology,
        report.trial_index,
        report.trial_seed,
        report.ue,
        report.window_m.0,
        report.window_m.1,
        report.bs_count
    )
    .unwrap();
    writeln!(
        out,
        "initial association: BS {} at {:.1} m (nearest)",
        o.initial_serving_bs, report.initial_distance_m
    )
    .unwrap();

    writeln!(
        out,
        "uplink: tx power {:.3e} W toward BS {} at {:.1} m; head SAR {:.3e} W/kg (trigger {:.3e} W/kg)",
        o.ue_tx_power_w,
        o.uplink_serving_bs,
        report.uplink_serving_distance_m,
        o.uplink.sar_w_kg,
        report.trigger_threshold_w_kg
    )
    .unwrap();
    let sar_handover = report
        .decisions
        .iter()
        .find(|d| d.cause == HandoverCause::SarTrigger);
    if !o.triggered {
        writeln!(out, "  no trigger; serving BS retained").unwrap();
    } else if o.uplink_outage {
        writeln!(
            out,
            "  trigger fired but no candidate passes the SNR floor; uplink outage, still attached to BS {}",
            o.uplink_serving_bs
        )
        .unwrap();
    } else if let Some(d) = sar_handover {
        writeln!(
            out,
            "  trigger fired: handed over BS {} -> BS {} (predicted SAR {:.3e} -> {:.3e} W/kg over {} candidates)",
            d.from_bs,
            d.to_bs,
            d.predicted_sar_before_w_kg,
            d.predicted_sar_after_w_kg,
            d.candidates_evaluated
        )
        .unwrap();
    } else {
        writeln!(
            out,
            "  trigger fired but the serving BS already has the least emission; no handover"
        )
        .unwrap();
    }

    write!(
        out,
        "downlink: served by BS {}, incident PD {:.3e} W/m2 over {} visible BSs, surface SAR {:.3e} W/kg",
        o.downlink_serving_bs,
        o.downlink.incident_pd_w_m2,
        report.bs_count,
        o.downlink.sar_w_kg
    )
    .unwrap();
    out.push('\n');
    if let Some(d) = report
        .decisions
        .iter()
        .find(|d| d.cause == HandoverCause::DownlinkExposure)
    {
        writeln!(
            out,
            "  reselected BS {} -> BS {} for exposure (total SAR {:.3e} -> {:.3e} W/kg over {} feasible)",
            d.from_bs, d.to_bs, d.predicted_sar_before_w_kg, d.predicted_sar_after_w_kg,
            d.candidates_evaluated
        )
        .unwrap();
    } else if o.downlink_outage {
        writeln!(
            out,
            "  no BS meets the rate floor; downlink outage, listening to BS {}",
            o.downlink_serving_bs
        )
        .unwrap();
    } else {
        writeln!(
            out,
            "  uplink serving BS already minimizes downlink exposure"
        )
        .unwrap();
    }

    writeln!(
        out,
        "compliance: uplink {} ({:.2}% of SAR limit), downlink {} ({:.2e}% of SAR limit)",
        if o.uplink.compliant { "OK" } else { "EXCEEDED" },
        100.0 * o.uplink.sar_limit_fraction,
        if o.downlink.compliant {
            "OK"
        } else {
            "EXCEEDED"
        },
        100.0 * o.downlink.sar_limit_fraction
    )
    .unwrap();
    out
}
