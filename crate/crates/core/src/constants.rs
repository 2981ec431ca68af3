//! Physical constants shared across modules.

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Boltzmann constant (J/K), 2019 SI exact value.
pub const BOLTZMANN_J_K: f64 = 1.380_649e-23;

/// Reference temperature for thermal noise (K).
pub const NOISE_TEMPERATURE_K: f64 = 290.0;

/// Path-loss reference distance (m). Distances below it are clamped.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;
