//! Deployment geometry: base-station point processes, user drops, bearings.
//!
//! Base stations are either a homogeneous Poisson point process with
//! intensity `1 / (π·cell_radius²)` — one BS per nominal cell disc on
//! average — or a cell-centered square lattice with spacing
//! `2·cell_radius`. Users are dropped uniformly; each carries a fixed
//! head azimuth describing which way the device radiates into the head.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::seed::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Resample attempts granted to a Poisson draw before giving up.
pub const MAX_SAMPLE_ATTEMPTS: u32 = 8;

/// A point in the simulation plane (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn distance(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// How base-station positions are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeploymentMode {
    /// Homogeneous Poisson point process, intensity `1/(π·cell_radius²)`.
    Ppp,
    /// Cell-centered square lattice, spacing `2·cell_radius`.
    Grid,
}

/// Inputs of one topology draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentConfig {
    /// Rectangular window extents (width, height) in meters.
    pub window_m: (f64, f64),
    pub mode: DeploymentMode,
    /// Nominal cell radius in meters; sets the BS intensity or lattice pitch.
    pub cell_radius_m: f64,
    /// Seed of this draw; all randomness derives from it.
    pub seed: u64,
    /// Number of users dropped uniformly in the window.
    pub ue_count: usize,
}

impl DeploymentConfig {
    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.window_m;
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(Error::Config(format!(
                "window_m: extents must be finite and > 0 (got {w} x {h})"
            )));
        }
        if !(self.cell_radius_m > 0.0 && self.cell_radius_m.is_finite()) {
            return Err(Error::Config(format!(
                "cell_radius_m: must be finite and > 0 (got {})",
                self.cell_radius_m
            )));
        }
        if self.ue_count == 0 {
            return Err(Error::Config("ue_count: must be >= 1".into()));
        }
        Ok(())
    }

    /// PPP intensity (BSs per m²).
    pub fn intensity(&self) -> f64 {
        1.0 / (PI * self.cell_radius_m * self.cell_radius_m)
    }

    /// Expected BS count of the PPP, `λ · area`.
    pub fn expected_bs_count(&self) -> f64 {
        self.intensity() * self.window_m.0 * self.window_m.1
    }
}

/// One sampled scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub bs_positions: Vec<Point2D>,
    pub ue_positions: Vec<Point2D>,
    /// Per-UE azimuth (radians, `[0, 2π)`) along which the device radiates
    /// into the user's head.
    pub head_azimuth_rad: Vec<f64>,
    /// Seed the accepted draw actually consumed (PPP resamples advance it).
    pub seed_used: u64,
}

/// Draw a topology from `config`.
///
/// PPP mode redraws with seeds `derive_seed(config.seed, attempt)` until the
/// BS count is positive, giving up after [`MAX_SAMPLE_ATTEMPTS`]. Grid mode
/// is deterministic in the BS layout; user positions and head azimuths are
/// drawn from the same derived stream as attempt 0.
pub fn sample_topology(config: &DeploymentConfig) -> Result<Topology> {
    config.validate()?;
    let (w, h) = config.window_m;
    match config.mode {
        DeploymentMode::Grid => {
            let bs_positions = grid_positions(w, h, config.cell_radius_m);
            if bs_positions.is_empty() {
                // No lattice center fits the window; the grid cannot be
                // resampled, so fail immediately.
                return Err(Error::EmptyDeployment { attempts: 1 });
            }
            let seed_used = derive_seed(config.seed, 0);
            let mut rng = rng_from_seed(seed_used);
            let (ue_positions, head_azimuth_rad) = draw_users(&mut rng, w, h, config.ue_count);
            Ok(Topology {
                bs_positions,
                ue_positions,
                head_azimuth_rad,
                seed_used,
            })
        }
        DeploymentMode::Ppp => {
            let mean = config.expected_bs_count();
            let poisson = Poisson::new(mean)
                .map_err(|e| Error::Config(format!("cell_radius_m/window_m: {e}")))?;
            for attempt in 0..MAX_SAMPLE_ATTEMPTS {
                let seed_used = derive_seed(config.seed, u64::from(attempt));
                let mut rng = rng_from_seed(seed_used);
                let count = poisson.sample(&mut rng) as usize;
                if count == 0 {
                    continue;
                }
                let bs_positions = (0..count).map(|_| uniform_point(&mut rng, w, h)).collect();
                let (ue_positions, head_azimuth_rad) = draw_users(&mut rng, w, h, config.ue_count);
                return Ok(Topology {
                    bs_positions,
                    ue_positions,
                    head_azimuth_rad,
                    seed_used,
                });
            }
            Err(Error::EmptyDeployment {
                attempts: MAX_SAMPLE_ATTEMPTS,
            })
        }
    }
}

/// Lattice centers `((i+1/2)·s, (j+1/2)·s)` with `s = 2·cell_radius` that
/// fall inside the window (boundary inclusive).
fn grid_positions(w: f64, h: f64, cell_radius_m: f64) -> Vec<Point2D> {
    let s = 2.0 * cell_radius_m;
    let mut out = Vec::new();
    let mut i = 0u64;
    loop {
        let x = (i as f64 + 0.5) * s;
        if x > w {
            break;
        }
        let mut j = 0u64;
        loop {
            let y = (j as f64 + 0.5) * s;
            if y > h {
                break;
            }
            out.push(Point2D::new(x, y));
            j += 1;
        }
        i += 1;
    }
    out
}

fn uniform_point<R: Rng>(rng: &mut R, w: f64, h: f64) -> Point2D {
    // One point consumes exactly two draws, x then y, so layouts are a
    // stable function of the seed.
    let x = rng.random_range(0.0..w);
    let y = rng.random_range(0.0..h);
    Point2D::new(x, y)
}

fn draw_users<R: Rng>(rng: &mut R, w: f64, h: f64, count: usize) -> (Vec<Point2D>, Vec<f64>) {
    let positions: Vec<Point2D> = (0..count).map(|_| uniform_point(rng, w, h)).collect();
    let azimuths = (0..count)
        .map(|_| rng.random_range(0.0..2.0 * PI))
        .collect();
    (positions, azimuths)
}

/// Bearing of `target` as seen from `origin`, in `[0, 2π)`.
///
/// Errors with [`Error::UndefinedAzimuth`] when the points coincide.
pub fn azimuth(origin: Point2D, target: Point2D) -> Result<f64> {
    let dx = target.x - origin.x;
    let dy = target.y - origin.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::UndefinedAzimuth);
    }
    Ok(normalize_azimuth(dy.atan2(dx)))
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_to_pi(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = angle % two_pi;
    if r > PI {
        r -= two_pi;
    } else if r <= -PI {
        r += two_pi;
    }
    r
}

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_azimuth(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = angle % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    // Guard the rounding case where a tiny negative folds onto 2π itself.
    if r >= two_pi {
        r = 0.0;
    }
    r
}

/// A direction reference: either an explicit azimuth or a point whose
/// bearing from the origin supplies one.
#[derive(Debug, Clone, Copy)]
pub enum Bearing {
    Azimuth(f64),
    Toward(Point2D),
}

impl From<f64> for Bearing {
    fn from(a: f64) -> Self {
        Bearing::Azimuth(a)
    }
}

impl From<Point2D> for Bearing {
    fn from(p: Point2D) -> Self {
        Bearing::Toward(p)
    }
}

/// Smallest angle, in `[0, π]`, between two bearings seen from `origin`.
pub fn azimuth_separation(
    origin: Point2D,
    a: impl Into<Bearing>,
    b: impl Into<Bearing>,
) -> Result<f64> {
    let resolve = |bearing: Bearing| -> Result<f64> {
        match bearing {
            Bearing::Azimuth(az) => Ok(az),
            Bearing::Toward(p) => azimuth(origin, p),
        }
    };
    let ta = resolve(a.into())?;
    let tb = resolve(b.into())?;
    Ok(wrap_to_pi(ta - tb).abs())
}
