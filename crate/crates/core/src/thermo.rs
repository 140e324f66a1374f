//! Entropy of the fluctuating field between plates and Nernst-theorem checks.
//!
//! S = −∂F/∂T is taken numerically from the Lifshitz free energy. Two
//! closed forms anchor the T → 0 behaviour:
//!
//! * the modified ideal metal, S(z, 0) = −ζ(3) k_B / (16π z²);
//! * a Drude metal with a perfect lattice, whose static TE term is missing
//!   while its relaxation vanishes, leaving
//!   S(z, 0) = k_B/(16π z²) ∫ y ln[1 − ρ²(y) e^{−y}] dy with
//!   ρ = (y − √(a² + y²)) / (y + √(a² + y²)), a = 2 ω_p z / c.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lifshitz::{free_energy_per_area, EvaluationPoint};
use crate::materials::{BoundaryModel, MaterialSpec};
use crate::numerics::{
    default_temperature_step, derivative_in_t, integrate_decaying, QuadratureSpec, CONSTANTS, ZETA3,
};
use crate::reflection::zero_frequency_pair;

/// Lowest temperature at which the finite-difference entropy is evaluated, K.
pub const MIN_ENTROPY_TEMPERATURE: f64 = 2.0;

/// Nernst threshold as a fraction of |S_MIM(z, 0)|.
pub const NERNST_RELATIVE_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyResult {
    /// Entropy per unit plate area, J/(K·m²).
    pub value: f64,
    pub numeric_error: f64,
    pub temperature: f64,
    pub model: BoundaryModel,
}

/// k_B / (16π z²), the natural entropy scale per unit area.
fn entropy_scale(z: f64) -> f64 {
    CONSTANTS.k_b / (16.0 * PI * z * z)
}

pub fn entropy(
    z: f64,
    temperature: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<EntropyResult> {
    if !(temperature >= MIN_ENTROPY_TEMPERATURE) {
        return Err(Error::invalid(
            "temperature",
            format!(
                "entropy needs T >= {MIN_ENTROPY_TEMPERATURE} K, got {temperature} K; \
                 use the closed forms at T = 0"
            ),
        ));
    }
    EvaluationPoint::new(z, temperature)?;
    let step = default_temperature_step(temperature);
    let worst_energy_error = std::cell::Cell::new(0.0_f64);
    let d = derivative_in_t(
        |t| {
            let f = free_energy_per_area(&EvaluationPoint::new(z, t)?, model, material, quad)?;
            worst_energy_error.set(worst_energy_error.get().max(f.numeric_error));
            Ok(f.value)
        },
        temperature,
        step,
    )?;
    Ok(EntropyResult {
        value: -d.value,
        numeric_error: d.error + worst_energy_error.get() / step,
        temperature,
        model,
    })
}

/// ∫₀^∞ y ln[1 − ρ² e^{−y}] dy for the dimensionless a = 2 ω_p z / c.
pub fn static_te_deficit_integral(a: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::invalid("a", format!("must be finite and non-negative, got {a}")));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let r = integrate_decaying(
        |y| {
            if y == 0.0 {
                return 0.0;
            }
            let s = a.hypot(y);
            let sum = y + s;
            let rho_abs = a * a / (sum * sum);
            let rho2e = rho_abs * rho_abs * (-y).exp();
            let ln = if rho2e < 0.5 {
                (-rho2e).ln_1p()
            } else {
                // 1 − ρ² = (1 − |ρ|)(1 + |ρ|) with 1 − |ρ| = 2y/(y + s)
                let one_minus_rho2 = 2.0 * y / sum * (1.0 + rho_abs);
                (one_minus_rho2 - rho_abs * rho_abs * (-y).exp_m1()).ln()
            };
            y * ln
        },
        quad,
    )?;
    Ok(r.value)
}

/// T = 0 entropy of a Drude metal with a perfect lattice, J/(K·m²). Negative.
pub fn perfect_drude_entropy_t0(z: f64, material: &MaterialSpec, quad: &QuadratureSpec) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::invalid("z", format!("must be positive, got {z}")));
    }
    let a = 2.0 * material.omega_p() * z / CONSTANTS.c;
    Ok(entropy_scale(z) * static_te_deficit_integral(a, quad)?)
}

/// The same quantity assembled from the static reflection coefficients:
/// k_B/(16π z²) ∫ y ln[1 − r_te(0, y/2z)² e^{−y}] dy, where r_te is taken
/// from `model`'s zero-frequency prescription.
pub fn static_te_entropy(z: f64, model: BoundaryModel, material: &MaterialSpec, quad: &QuadratureSpec) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let r = integrate_decaying(
        |y| {
            if y == 0.0 {
                return 0.0;
            }
            match zero_frequency_pair(model, material, y / (2.0 * z)) {
                Ok(p) => {
                    let x = p.r_te * p.r_te * (-y).exp();
                    y * if x < 0.5 {
                        (-x).ln_1p()
                    } else {
                        (-(-y).exp_m1() + (1.0 - p.r_te * p.r_te) * (-y).exp()).ln()
                    }
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    f64::NAN
                }
            }
        },
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(entropy_scale(z) * r?.value)
}

/// F_MIM = F_IM + ζ(3) k_B T / (16π z²).
pub fn mim_free_energy(z: f64, temperature: f64, ideal_free_energy: f64) -> f64 {
    ideal_free_energy + ZETA3 * CONSTANTS.k_b * temperature / (16.0 * PI * z * z)
}

/// S_MIM(z, 0) = −ζ(3) k_B / (16π z²).
pub fn mim_entropy_t0(z: f64) -> f64 {
    -ZETA3 * entropy_scale(z)
}

pub fn nernst_threshold(z: f64) -> f64 {
    NERNST_RELATIVE_THRESHOLD * mim_entropy_t0(z).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NernstVerdict {
    pub model: BoundaryModel,
    pub z: f64,
    /// Linear extrapolation of S to T = 0 from the three lowest temperatures.
    pub limit_estimate: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// (T, S) pairs in the order of the input grid.
    pub trajectory: Vec<(f64, f64)>,
}

/// Intercept of the least-squares line through `points`.
fn linear_intercept(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    my - sxy / sxx * mx
}

/// Default descending grid for Nernst scans, K.
pub const DEFAULT_NERNST_GRID: [f64; 6] = [20.0, 10.0, 5.0, 3.0, 2.5, 2.0];

pub fn nernst_scan(
    z: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    t_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<NernstVerdict> {
    if t_grid.len() < 5 {
        return Err(Error::invalid(
            "T_grid",
            format!("need at least 5 points, got {}", t_grid.len()),
        ));
    }
    if t_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("T_grid", "temperatures must be strictly descending"));
    }
    let t_min = t_grid[t_grid.len() - 1];
    if !(t_min >= MIN_ENTROPY_TEMPERATURE) {
        return Err(Error::invalid(
            "T_grid",
            format!("lowest temperature must be >= {MIN_ENTROPY_TEMPERATURE} K, got {t_min}"),
        ));
    }
    let trajectory: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|&t| entropy(z, t, model, material, quad).map(|s| (t, s.value)))
        .collect::<Result<_>>()?;
    let lowest = &trajectory[trajectory.len() - 3..];
    let limit_estimate = linear_intercept(lowest);
    let threshold = nernst_threshold(z);
    Ok(NernstVerdict {
        model,
        z,
        limit_estimate,
        threshold,
        satisfied: limit_estimate.abs() < threshold,
        trajectory,
    })
}
