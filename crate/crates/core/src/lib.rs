//! Seeded cellular-network simulator quantifying human EMF exposure.
//!
//! The crate models a single-operator deployment (Poisson or grid base
//! stations, uniformly dropped users), computes incident power density and
//! surface SAR for both link directions under 3.9G/4G/5G technology
//! profiles, and evaluates an exposure-aware association protocol that
//! reacts to SAR-threshold violations by handing the user over to the base
//! station with the least emission toward it — instead of backing off
//! transmit power.
//!
//! Everything downstream of a `u64` master seed is deterministic: trial
//! seeds are derived per index, so campaigns produce byte-identical outputs
//! regardless of the parallelism used to run them.

pub mod config;
pub mod constants;
pub mod dosimetry;
pub mod engine;
pub mod protocol;
pub mod radio;
pub mod record;
pub mod runner;
pub mod seed;
pub mod topology;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
