//! Run configuration: JSON in, resolved structs out.
//!
//! Every field has a default, so `{}` is a valid config (the stock
//! three-technology comparison). Unknown keys are rejected rather than
//! ignored — a typo'd knob should fail loudly, not silently fall back.

use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::dosimetry::{ExposureLimits, TissueModel};
use crate::engine::{preset, SimulationSettings, TechnologyProfile};
use crate::topology::DeploymentMode;
use crate::{Error, Result};

/// How much per-trial detail `run_record.json` keeps.
///
/// * `summary`: aggregates only.
/// * `decisions`: plus per-trial protocol decisions and UE outcomes.
/// * `full`: plus topologies, boresights, and per-source breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordLevel {
    Summary,
    Decisions,
    Full,
}

impl std::str::FromStr for RecordLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "summary" => Ok(Self::Summary),
            "decisions" => Ok(Self::Decisions),
            "full" => Ok(Self::Full),
            other => Err(Error::Config(format!(
                "record_level: unknown level `{other}` (expected summary, decisions, or full)"
            ))),
        }
    }
}

impl fmt::Display for RecordLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Summary => "summary",
            Self::Decisions => "decisions",
            Self::Full => "full",
        })
    }
}

/// One scenario: either a bare technology name (`"5G"`) or a preset with
/// overrides (`{"base": "5G", "name": "5G-sparse", "cell_radius_m": 400}`).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScenarioSpec {
    Name(String),
    Custom(Box<ScenarioOverrides>),
}

/// Preset refinement; any omitted field keeps the base's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathloss_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_figure_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_min_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power_max_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_rx_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_link_distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bs_elements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ue_elements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_gain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bs_tx_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplink_snr_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downlink_rate_floor_bps: Option<f64>,
}

impl<'de> Deserialize<'de> for ScenarioSpec {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        struct SpecVisitor;

        impl<'de> Visitor<'de> for SpecVisitor {
            type Value = ScenarioSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a technology name string or an override object with `base`")
            }

            fn visit_str<E: serde::de::Error>(
                self,
                s: &str,
            ) -> std::result::Result<ScenarioSpec, E> {
                Ok(ScenarioSpec::Name(s.to_string()))
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                map: A,
            ) -> std::result::Result<ScenarioSpec, A::Error> {
                let overrides = ScenarioOverrides::deserialize(
                    serde::de::value::MapAccessDeserializer::new(map),
                )?;
                Ok(ScenarioSpec::Custom(Box::new(overrides)))
            }
        }

        deserializer.deserialize_any(SpecVisitor)
    }
}

impl ScenarioSpec {
    /// Resolve to a full profile. Bare names map to [`preset`]; custom
    /// specs start from their base preset and apply overrides.
    pub fn build(&self) -> Result<TechnologyProfile> {
        match self {
            Self::Name(name) => preset(name),
            Self::Custom(o) => {
                let mut p = preset(&o.base)?;
                if let Some(v) = &o.name {
                    p.name = v.clone();
                }
                macro_rules! apply {
                    (radio $field:ident) => {
                        if let Some(v) = o.$field {
                            p.radio.$field = v;
                        }
                    };
                    ($field:ident) => {
                        if let Some(v) = o.$field {
                            p.$field = v;
                        }
                    };
                }
                apply!(radio carrier_hz);
                apply!(radio bandwidth_hz);
                apply!(radio pathloss_exponent);
                apply!(radio noise_figure_db);
                apply!(radio tx_power_min_w);
                apply!(radio tx_power_max_w);
                apply!(radio target_rx_power_w);
                apply!(radio min_link_distance_m);
                apply!(cell_radius_m);
                apply!(bs_elements);
                apply!(ue_elements);
                apply!(side_gain);
                apply!(bs_tx_power_w);
                apply!(uplink_snr_floor);
                apply!(downlink_rate_floor_bps);
                p.validate()?;
                Ok(p)
            }
        }
    }
}

/// Where base stations and users go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeploymentBlock {
    pub window_m: (f64, f64),
    pub mode: DeploymentMode,
    pub ue_count: usize,
}

impl Default for DeploymentBlock {
    fn default() -> Self {
        Self {
            window_m: (3000.0, 3000.0),
            mode: DeploymentMode::Ppp,
            ue_count: 8,
        }
    }
}

/// Tissue under the incident field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TissueBlock {
    pub density_kg_m3: f64,
    /// Optional dielectric table file (`frequency_hz, eps_real, eps_imag`
    /// per line); the built-in skin table when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_path: Option<String>,
}

impl Default for TissueBlock {
    fn default() -> Self {
        Self {
            density_kg_m3: 1100.0,
            table_path: None,
        }
    }
}

/// Exposure limits and protocol reaction knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExposureBlock {
    pub pd_limit_w_m2: f64,
    pub sar_limit_w_kg: f64,
    pub sar_trigger_w_kg: f64,
    pub sar_trigger_margin: f64,
    pub device_head_distance_m: f64,
}

impl Default for ExposureBlock {
    fn default() -> Self {
        Self {
            pd_limit_w_m2: 10.0,
            sar_limit_w_kg: 1.6,
            sar_trigger_w_kg: 1.6,
            sar_trigger_margin: 0.0,
            device_head_distance_m: 0.05,
        }
    }
}

/// A complete run description. Serializing the resolved value and parsing
/// it back is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenarios: Vec<ScenarioSpec>,
    pub trials: usize,
    pub master_seed: u64,
    /// 0 = all cores, 1 = sequential, k = a dedicated k-thread pool.
    pub parallelism: usize,
    pub deployment: DeploymentBlock,
    pub tissue: TissueBlock,
    pub exposure: ExposureBlock,
    pub output_dir: String,
    pub record_level: RecordLevel,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenarios: vec![
                ScenarioSpec::Name("5G".into()),
                ScenarioSpec::Name("4G".into()),
                ScenarioSpec::Name("3.9G".into()),
            ],
            trials: 1000,
            master_seed: 1,
            parallelism: 0,
            deployment: DeploymentBlock::default(),
            tissue: TissueBlock::default(),
            exposure: ExposureBlock::default(),
            output_dir: "out".into(),
            record_level: RecordLevel::Decisions,
        }
    }
}

impl RunConfig {
    /// Resolve into engine inputs, validating everything on the way.
    pub fn build(&self) -> Result<(Vec<TechnologyProfile>, SimulationSettings)> {
        if self.scenarios.is_empty() {
            return Err(Error::Config(
                "scenarios: need at least one technology".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials: must be >= 1".into()));
        }
        let mut profiles = Vec::with_capacity(self.scenarios.len());
        for spec in &self.scenarios {
            let profile = spec.build()?;
            if profiles
                .iter()
                .any(|p: &TechnologyProfile| p.name == profile.name)
            {
                return Err(Error::Config(format!(
                    "scenarios: duplicate name `{}`",
                    profile.name
                )));
            }
            profiles.push(profile);
        }
        let tissue = match &self.tissue.table_path {
            Some(path) => TissueModel::from_table_file(Path::new(path), self.tissue.density_kg_m3)?,
            None => TissueModel::new(self.tissue.density_kg_m3, TissueModel::default_skin().table)?,
        };
        let settings = SimulationSettings {
            window_m: self.deployment.window_m,
            mode: self.deployment.mode,
            ue_count: self.deployment.ue_count,
            tissue,
            limits: ExposureLimits {
                pd_limit_w_m2: self.exposure.pd_limit_w_m2,
                sar_limit_w_kg: self.exposure.sar_limit_w_kg,
                sar_trigger_w_kg: self.exposure.sar_trigger_w_kg,
            },
            device_head_distance_m: self.exposure.device_head_distance_m,
            sar_trigger_margin: self.exposure.sar_trigger_margin,
        };
        settings.validate()?;
        Ok((profiles, settings))
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }
}

/// Parse a JSON config. `{}` gives the defaults; unknown keys error.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    Ok(serde_json::from_str(text)?)
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
