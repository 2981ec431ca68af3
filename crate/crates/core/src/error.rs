use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A point process produced no base station after the allowed resamples.
    #[error("empty deployment: no base station after {attempts} attempt(s)")]
    EmptyDeployment { attempts: u32 },

    /// Bearing requested between coincident points.
    #[error("undefined azimuth: target coincides with origin")]
    UndefinedAzimuth,

    /// A link evaluation received a non-positive or non-finite distance.
    #[error("invalid distance: {0} m (must be finite and > 0)")]
    InvalidDistance(f64),

    /// Penetration depth diverges when the tissue has no dielectric loss.
    #[error("lossless medium: penetration depth unbounded")]
    LosslessMedium,

    /// Queried frequency is not bracketed by the tissue table.
    #[error("frequency outside tissue table: {frequency_hz:e} Hz not within [{min_hz:e}, {max_hz:e}] Hz")]
    FrequencyOutsideTable {
        frequency_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },

    /// Selection ran out of base stations meeting its feasibility floor.
    #[error("no feasible BS")]
    NoFeasibleBs,

    /// Unknown technology profile name.
    #[error("unknown technology `{0}` (known: 5G, 4G, 3.9G)")]
    UnknownTechnology(String),

    /// Invalid parameter value; the message names the offending key.
    #[error("invalid config: {0}")]
    Config(String),

    /// Malformed configuration or record text (includes line/column).
    #[error("config syntax: {0}")]
    ConfigSyntax(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
