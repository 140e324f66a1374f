use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::dataset::{Dataset, DatasetKind, Record};
use super::theory::Theory;

/// Mean Drude-minus-experiment pressure deviations, (z nm, mPa).
pub const DEVIATION_LADDER_MPA: [(f64, f64); 5] =
    [(260.0, 5.5), (300.0, 5.0), (400.0, 2.0), (500.0, 0.8), (600.0, 0.4)];

/// Default ladder scale: each quoted mean deviation is taken as the
/// two-sided 95% half-width of a single point, σ = D / 1.96.
pub const LADDER_NOISE_SCALE: f64 = 1.0 / 1.96;

/// Per-point standard deviation σ(z) of the Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseProfile {
    Constant {
        sigma: f64,
    },
    /// `scale` times the deviation ladder, interpolated linearly in ln σ
    /// and extrapolated with the end slopes. Pressure only.
    Ladder {
        scale: f64,
    },
    /// Arbitrary (z m, σ SI) knots, same interpolation as the ladder.
    Knots {
        points: Vec<(f64, f64)>,
    },
}

fn log_interpolate(points: &[(f64, f64)], z: f64) -> f64 {
    if points.len() == 1 {
        return points[0].1;
    }
    let i = match points.iter().position(|p| p.0 > z) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => points.len() - 2,
    };
    let (z0, s0) = points[i];
    let (z1, s1) = points[i + 1];
    let t = (z - z0) / (z1 - z0);
    (s0.ln() + t * (s1.ln() - s0.ln())).exp()
}

impl NoiseProfile {
    pub fn validate(&self, kind: DatasetKind) -> Result<()> {
        match self {
            NoiseProfile::Constant { sigma } if !(*sigma >= 0.0) || !sigma.is_finite() => Err(Error::invalid(
                "noise",
                format!("sigma must be non-negative, got {sigma}"),
            )),
            NoiseProfile::Ladder { .. } if kind != DatasetKind::Pressure => {
                Err(Error::invalid("noise", "the deviation ladder is a pressure profile"))
            }
            NoiseProfile::Ladder { scale } if !(*scale >= 0.0) || !scale.is_finite() => Err(Error::invalid(
                "noise",
                format!("ladder scale must be non-negative, got {scale}"),
            )),
            NoiseProfile::Knots { points } => {
                if points.is_empty()
                    || points.iter().any(|p| !(p.0 > 0.0) || !(p.1 > 0.0) || !p.1.is_finite())
                    || points.windows(2).any(|w| !(w[1].0 > w[0].0))
                {
                    Err(Error::invalid("noise", "knots need ascending z and positive sigma"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// σ at separation z, SI units.
    pub fn sigma_at(&self, z: f64) -> f64 {
        match self {
            NoiseProfile::Constant { sigma } => *sigma,
            NoiseProfile::Ladder { scale } => {
                if *scale == 0.0 {
                    return 0.0;
                }
                let pts: Vec<(f64, f64)> = DEVIATION_LADDER_MPA
                    .iter()
                    .map(|&(z, s)| (z * 1e-9, s * 1e-3))
                    .collect();
                scale * log_interpolate(&pts, z)
            }
            NoiseProfile::Knots { points } => log_interpolate(points, z),
        }
    }
}

/// theory(z) + N(0, σ(z)²) on the grid, reproducible per seed and
/// independent of the number of worker threads.
pub fn synthesize_dataset(
    theory: &dyn Theory,
    z_grid: &[f64],
    noise: &NoiseProfile,
    seed: u64,
    label: impl Into<String>,
) -> Result<Dataset> {
    noise.validate(theory.kind())?;
    if z_grid.is_empty() {
        return Err(Error::invalid("z_grid", "empty grid"));
    }
    let values = z_grid
        .par_iter()
        .map(|&z| theory.evaluate(z).map(|v| v.0))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = z_grid
        .iter()
        .zip(values)
        .map(|(&z, v)| {
            let sigma = noise.sigma_at(z);
            let draw: f64 = rng.sample(StandardNormal);
            Record {
                z,
                value: v + sigma * draw,
                sigma,
            }
        })
        .collect();
    Dataset::new(theory.kind(), records, label)
}
