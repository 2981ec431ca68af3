//! Run artifacts: the JSON run record and the two CSV tables.
//!
//! Floats are written as `{:.16e}` — 17 significant digits — so every CSV
//! value parses back to the exact bit pattern it was computed as, and
//! identical runs produce byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{RecordLevel, RunConfig};
use crate::engine::{CampaignOutput, CampaignResult, ComparisonSummary, TechnologyTrials};

/// Everything a run leaves behind, in one self-describing document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// The fully-resolved configuration the run actually used.
    pub resolved_config: RunConfig,
    pub campaign: CampaignResult,
    pub comparison: ComparisonSummary,
    /// Per-trial detail, present and trimmed according to the record level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<TechnologyTrials>>,
}

impl RunRecord {
    /// Assemble a record, trimming trial detail to `level`:
    /// `summary` keeps aggregates only, `decisions` drops topologies,
    /// boresights, and per-source breakdowns, `full` keeps everything.
    pub fn new(
        resolved_config: RunConfig,
        output: CampaignOutput,
        comparison: ComparisonSummary,
        level: RecordLevel,
    ) -> Self {
        let trials = match level {
            RecordLevel::Summary => None,
            RecordLevel::Full => Some(output.trials),
            RecordLevel::Decisions => {
                let mut sets = output.trials;
                for set in &mut sets {
                    for rec in &mut set.records {
                        rec.topology = None;
                        rec.bs_boresights.clear();
                        for ue in &mut rec.ues {
                            ue.uplink.per_source.clear();
                            ue.downlink.per_source.clear();
                        }
                    }
                }
                Some(sets)
            }
        };
        Self {
            resolved_config,
            campaign: output.result,
            comparison,
            trials,
        }
    }
}

/// Full-precision scientific notation; round-trips every finite f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Quote a CSV field when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Per-technology, per-direction statistics table. One `downlink` row and
/// one `uplink` row per technology, in campaign order.
pub fn summary_csv(result: &CampaignResult) -> String {
    let mut out = String::from(
        "technology,direction,mean_sar_w_kg,stderr_sar_w_kg,ci95_half_width_sar_w_kg,\
         mean_pd_w_m2,stderr_pd_w_m2,ci95_half_width_pd_w_m2,trials_run,trials_skipped,\
         handover_count,outage_count,noncompliant_count\n",
    );
    for tech in &result.technologies {
        let rows = [
            (
                "downlink",
                &tech.downlink,
                tech.downlink_reselect_count,
                tech.downlink_outage_count,
                tech.downlink_noncompliant_count,
            ),
            (
                "uplink",
                &tech.uplink,
                tech.sar_handover_count,
                tech.uplink_outage_count,
                tech.uplink_noncompliant_count,
            ),
        ];
        for (direction, stats, handovers, outages, noncompliant) in rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&tech.technology),
                direction,
                fmt_f64(stats.mean_sar_w_kg),
                fmt_f64(stats.stderr_sar_w_kg),
                fmt_f64(stats.sar_ci95_half_width_w_kg),
                fmt_f64(stats.mean_pd_w_m2),
                fmt_f64(stats.stderr_pd_w_m2),
                fmt_f64(stats.pd_ci95_half_width_w_m2),
                tech.trials_run,
                tech.trials_skipped,
                handovers,
                outages,
                noncompliant,
            )
            .expect("writing to String cannot fail");
        }
    }
    out
}

/// The cross-technology SAR comparison in plot-ready form.
pub fn figure1_csv(result: &CampaignResult) -> String {
    let mut out = String::from("technology,direction,mean_sar_w_kg,ci_half_width\n");
    for tech in &result.technologies {
        for (direction, stats) in [("downlink", &tech.downlink), ("uplink", &tech.uplink)] {
            writeln!(
                out,
                "{},{},{},{}",
                csv_field(&tech.technology),
                direction,
                fmt_f64(stats.mean_sar_w_kg),
                fmt_f64(stats.sar_ci95_half_width_w_kg),
            )
            .expect("writing to String cannot fail");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{compare, preset, run_campaign, SimulationSettings};

    fn small_output() -> CampaignOutput {
        let profiles = vec![preset("5G").unwrap(), preset("4G").unwrap()];
        let settings = SimulationSettings {
            window_m: (1200.0, 1200.0),
            ue_count: 3,
            ..SimulationSettings::default()
        };
        run_campaign(&profiles, &settings, 6, 21, 1).unwrap()
    }

    #[test]
    fn record_levels_trim_what_they_promise() {
        let output = small_output();
        let comparison = compare(&output.result);
        let cfg = RunConfig::default();

        let summary = RunRecord::new(
            cfg.clone(),
            output.clone(),
            comparison.clone(),
            RecordLevel::Summary,
        );
        assert!(summary.trials.is_none());

        let decisions = RunRecord::new(
            cfg.clone(),
            output.clone(),
            comparison.clone(),
            RecordLevel::Decisions,
        );
        let sets = decisions.trials.as_ref().unwrap();
        assert_eq!(sets.len(), 2);
        for set in sets {
            for rec in &set.records {
                assert!(rec.topology.is_none());
                assert!(rec.bs_boresights.is_empty());
                for ue in &rec.ues {
                    assert!(ue.uplink.per_source.is_empty());
                    assert!(ue.downlink.per_source.is_empty());
                }
            }
        }
        // Decisions and scalar outcomes survive the trim.
        assert_eq!(
            sets[0].records[0].decisions,
            output.trials[0].records[0].decisions
        );
        assert_eq!(
            sets[0].records[0].ues[0].uplink.sar_w_kg,
            output.trials[0].records[0].ues[0].uplink.sar_w_kg
        );

        let full = RunRecord::new(cfg, output.clone(), comparison, RecordLevel::Full);
        assert_eq!(full.trials.as_ref().unwrap(), &output.trials);
        assert!(full.trials.unwrap()[0].records[0].topology.is_some());
    }

    #[test]
    fn record_serializes_and_round_trips() {
        let output = small_output();
        let comparison = compare(&output.result);
        let record = RunRecord::new(RunConfig::default(), output, comparison, RecordLevel::Full);
        let json = serde_json::to_string(&record).unwrap();
        let back: RunRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
        // Summary level omits the top-level key entirely.
        let record = RunRecord {
            trials: None,
            ..record
        };
        let json = serde_json::to_string(&record).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(value.get("trials").is_none());
    }

    #[test]
    fn summary_csv_has_two_rows_per_technology() {
        let output = small_output();
        let csv = summary_csv(&output.result);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 2 * 2);
        assert!(lines[0].starts_with("technology,direction,mean_sar_w_kg,stderr_sar_w_kg"));
        assert!(lines[1].starts_with("5G,downlink,"));
        assert!(lines[2].starts_with("5G,uplink,"));
        assert!(lines[3].starts_with("4G,downlink,"));
        assert!(lines[4].starts_with("4G,uplink,"));
        // Column count matches the header on every row.
        let cols = lines[0].split(',').count();
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), cols);
        }
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        let output = small_output();
        let tech = &output.result.technologies[0];
        let csv = figure1_csv(&output.result);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "5G");
        assert_eq!(row[1], "downlink");
        assert_eq!(row[2].parse::<f64>().unwrap(), tech.downlink.mean_sar_w_kg);
        assert_eq!(
            row[3].parse::<f64>().unwrap(),
            tech.downlink.sar_ci95_half_width_w_kg
        );
    }

    #[test]
    fn figure1_header_is_pinned() {
        let output = small_output();
        let csv = figure1_csv(&output.result);
        assert_eq!(
            csv.lines().next().unwrap(),
            "technology,direction,mean_sar_w_kg,ci_half_width"
        );
        assert_eq!(csv.lines().count(), 1 + 2 * 2);
    }

    #[test]
    fn awkward_technology_names_are_quoted() {
        let mut output = small_output();
        output.result.technologies[0].technology = "5G, dense \"urban\"".into();
        let csv = figure1_csv(&output.result);
        assert!(csv.contains("\"5G, dense \"\"urban\"\"\",downlink,"));
    }
}
