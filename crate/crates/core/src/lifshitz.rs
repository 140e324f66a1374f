//! Lifshitz free energy and pressure between two identical metal plates,
//! the sphere–plate force in the proximity-force approximation, reduction
//! factors and thermal corrections.
//!
//! Every k-integral is written in y = 2qz, so that for Matsubara index l
//!
//! ```text
//! F = k_B T / (8π z²) Σ'_l ∫_{y_l}^∞ y  Σ_α ln(1 − r_α² e^{−y}) dy
//! P = −k_B T / (8π z³) Σ'_l ∫_{y_l}^∞ y² Σ_α r_α² e^{−y} / (1 − r_α² e^{−y}) dy
//! ```
//!
//! with y_l = 2 ξ_l z / c. At T = 0 the primed sum becomes ħ/(2π k_B T)∫dξ.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::materials::{BoundaryModel, MaterialSpec};
use crate::numerics::{integrate_decaying, matsubara_spacing, primed_weight, QuadratureSpec, CONSTANTS};
use crate::reflection::{FrequencyResponse, Surface};

/// Separations accepted with the default quadrature settings, m.
pub const VALIDATED_SEPARATION: (f64, f64) = (50e-9, 10e-6);

/// Relative size of the estimated remaining Matsubara tail at which the sum stops.
pub const SERIES_TOLERANCE: f64 = 1e-10;

const MAX_MATSUBARA_TERMS: u64 = 5_000_000;

/// Beyond this y every integrand is below f64 resolution.
const Y_CUTOFF: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationPoint {
    /// Separation, m.
    pub z: f64,
    /// Temperature, K.
    pub temperature: f64,
}

impl EvaluationPoint {
    pub fn new(z: f64, temperature: f64) -> Result<Self> {
        let (lo, hi) = VALIDATED_SEPARATION;
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::invalid("z", format!("separation must be positive, got {z} m")));
        }
        if z < lo * (1.0 - 1e-12) || z > hi * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "z",
                format!("{:.3} nm lies outside the validated range [50 nm, 10 um]", z * 1e9),
            ));
        }
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::invalid(
                "temperature",
                format!("must be non-negative, got {temperature} K"),
            ));
        }
        Ok(EvaluationPoint { z, temperature })
    }

    /// Convenience constructor taking nanometres.
    pub fn nm(z_nm: f64, temperature: f64) -> Result<Self> {
        Self::new(z_nm * 1e-9, temperature)
    }

    fn require_finite_temperature(&self) -> Result<()> {
        if self.temperature > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(
                "temperature",
                "Matsubara sums need T > 0; use the zero-temperature operations",
            ))
        }
    }
}

/// A Casimir quantity with its numeric provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifshitzResult {
    /// SI value (J/m² for energies, Pa for pressures, N for forces).
    pub value: f64,
    pub numeric_error: f64,
    /// Highest Matsubara index summed; 0 for zero-temperature integrals.
    pub l_max_used: u64,
    pub model: BoundaryModel,
}

pub type PressureResult = LifshitzResult;
pub type FreeEnergyResult = LifshitzResult;

impl LifshitzResult {
    fn scaled(self, factor: f64) -> Self {
        LifshitzResult {
            value: self.value * factor,
            numeric_error: self.numeric_error * factor.abs(),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    PlatePlate,
    SpherePlate {
        /// Sphere radius, m.
        radius: f64,
    },
}

impl Geometry {
    /// Proximity-force validity: R > 100 z.
    pub fn check(&self, z: f64) -> Result<()> {
        match *self {
            Geometry::PlatePlate => Ok(()),
            Geometry::SpherePlate { radius } => {
                if radius > 100.0 * z && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "R",
                        format!("proximity-force approximation needs R > 100 z (R = {radius:e} m, z = {z:e} m)"),
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    FreeEnergy,
    Pressure,
}

impl Kernel {
    #[inline]
    fn eval(self, y: f64, response: &FrequencyResponse, z: f64) -> f64 {
        let pair = response.pair_from_q(y / (2.0 * z));
        let e = (-y).exp();
        let one_minus_e = -(-y).exp_m1();
        let mut acc = 0.0;
        for r in [pair.r_tm, pair.r_te] {
            let r2 = r * r;
            if r2 == 0.0 {
                continue;
            }
            let x = r2 * e;
            // 1 − r²e^{−y}, accurate both for x → 1 (y → 0, r² = 1) and x → 0
            let denom = one_minus_e + (1.0 - r2) * e;
            acc += match self {
                Kernel::FreeEnergy if x < 0.5 => (-x).ln_1p(),
                Kernel::FreeEnergy => denom.ln(),
                Kernel::Pressure => x / denom,
            };
        }
        match self {
            Kernel::FreeEnergy => y * acc,
            Kernel::Pressure => y * y * acc,
        }
    }

    /// SI prefactor multiplying the primed sum.
    fn thermal_prefactor(self, z: f64, temperature: f64) -> f64 {
        let kt = CONSTANTS.k_b * temperature;
        match self {
            Kernel::FreeEnergy => kt / (8.0 * PI * z * z),
            Kernel::Pressure => -kt / (8.0 * PI * z * z * z),
        }
    }

    fn zero_temperature_prefactor(self, z: f64) -> f64 {
        let hc = CONSTANTS.hbar_c();
        match self {
            Kernel::FreeEnergy => hc / (32.0 * PI * PI * z * z * z),
            Kernel::Pressure => -hc / (32.0 * PI * PI * z * z * z * z),
        }
    }
}

/// ∫_{y_l}^∞ of the kernel for a single frequency.
fn frequency_integral(
    kernel: Kernel,
    response: &FrequencyResponse,
    y_low: f64,
    z: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if y_low > Y_CUTOFF {
        return Ok((0.0, 0.0));
    }
    let r = integrate_decaying(|t| kernel.eval(y_low + t, response, z), quad)?;
    Ok((r.value, r.error))
}

struct SeriesSum {
    value: f64,
    error: f64,
    l_max: u64,
}

fn matsubara_sum(
    kernel: Kernel,
    pt: &EvaluationPoint,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<SeriesSum> {
    pt.require_finite_temperature()?;
    quad.validate()?;
    let surface = Surface::new(model, material, pt.temperature)?;
    let z = pt.z;
    let xi1 = matsubara_spacing(pt.temperature);
    let dy = 2.0 * xi1 * z / CONSTANTS.c;
    // Index of the characteristic frequency c/2z.
    let l_char = (1.0 / dy).ceil() as u64;
    let ratio = (-dy).exp();
    let tail_factor = ratio / (1.0 - ratio);

    let mut value = 0.0;
    let mut error = 0.0;
    let mut l = 0u64;
    loop {
        let xi = xi1 * l as f64;
        let response = surface.response(xi)?;
        let (term, term_err) = frequency_integral(kernel, &response, dy * l as f64, z, quad)?;
        let w = primed_weight(l);
        value += w * term;
        error += w * term_err;
        if l >= 1 {
            let tail = term.abs() * tail_factor;
            if l > l_char && tail <= SERIES_TOLERANCE * value.abs() {
                error += tail;
                break;
            }
            if l >= MAX_MATSUBARA_TERMS {
                return Err(Error::SeriesNonConvergence {
                    terms: l as usize + 1,
                    last_relative: tail / value.abs(),
                });
            }
        }
        l += 1;
    }
    let pre = kernel.thermal_prefactor(z, pt.temperature);
    Ok(SeriesSum {
        value: value * pre,
        error: error * pre.abs(),
        l_max: l,
    })
}

fn zero_temperature_integral(
    kernel: Kernel,
    z: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<LifshitzResult> {
    let pt = EvaluationPoint::new(z, 0.0)?;
    quad.validate()?;
    let surface = Surface::new(model, material, 0.0)?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_error = RefCell::new(0.0_f64);
    let outer = integrate_decaying(
        |y0| {
            if y0 > Y_CUTOFF || failure.borrow().is_some() {
                return 0.0;
            }
            let xi = y0 * CONSTANTS.c / (2.0 * pt.z);
            let result = surface
                .response(xi)
                .and_then(|resp| frequency_integral(kernel, &resp, y0, pt.z, quad));
            match result {
                Ok((v, e)) => {
                    let rel = e / v.abs().max(f64::MIN_POSITIVE);
                    let mut worst = inner_error.borrow_mut();
                    *worst = worst.max(rel);
                    v
                }
                Err(err) => {
                    *failure.borrow_mut() = Some(err);
                    f64::NAN
                }
            }
        },
        quad,
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let outer = outer?;
    let pre = kernel.zero_temperature_prefactor(z);
    let rel_inner = inner_error.into_inner();
    Ok(LifshitzResult {
        value: outer.value * pre,
        numeric_error: (outer.error + rel_inner * outer.value.abs()) * pre.abs(),
        l_max_used: 0,
        model,
    })
}

/// Free energy per unit area at T > 0, J/m².
pub fn free_energy_per_area(
    pt: &EvaluationPoint,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<FreeEnergyResult> {
    let s = matsubara_sum(Kernel::FreeEnergy, pt, model, material, quad)?;
    Ok(LifshitzResult {
        value: s.value,
        numeric_error: s.error,
        l_max_used: s.l_max,
        model,
    })
}

/// Plate–plate pressure at T > 0, Pa (negative = attraction).
pub fn pressure(
    pt: &EvaluationPoint,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<PressureResult> {
    let s = matsubara_sum(Kernel::Pressure, pt, model, material, quad)?;
    Ok(LifshitzResult {
        value: s.value,
        numeric_error: s.error,
        l_max_used: s.l_max,
        model,
    })
}

/// How a T = 0 evaluation treats a Drude metal with impurity relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResidualAtZero {
    /// Reject: the result depends on ν_residual, which is easy to overlook.
    #[default]
    Reject,
    /// Evaluate with ν(0) = ν_residual.
    Allow,
}

fn check_residual(model: BoundaryModel, material: &MaterialSpec, policy: ResidualAtZero) -> Result<()> {
    if model == BoundaryModel::Drude && !material.is_perfect_lattice() && policy == ResidualAtZero::Reject {
        return Err(Error::invalid(
            "nu_residual",
            format!(
                "T = 0 Drude with residual relaxation {} eV must be requested explicitly",
                material.nu_residual_ev()
            ),
        ));
    }
    Ok(())
}

/// Energy per unit area at T = 0 from the continuous frequency integral.
/// For Drude the relaxation is ν(0) = ν_residual, so a perfect lattice gives
/// the plasma result; impure Drude needs [`zero_temperature_energy_with`].
pub fn zero_temperature_energy(
    z: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<FreeEnergyResult> {
    zero_temperature_energy_with(z, model, material, quad, ResidualAtZero::Reject)
}

pub fn zero_temperature_energy_with(
    z: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
    residual: ResidualAtZero,
) -> Result<FreeEnergyResult> {
    check_residual(model, material, residual)?;
    zero_temperature_integral(Kernel::FreeEnergy, z, model, material, quad)
}

pub fn zero_temperature_pressure(
    z: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<PressureResult> {
    zero_temperature_pressure_with(z, model, material, quad, ResidualAtZero::Reject)
}

pub fn zero_temperature_pressure_with(
    z: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
    residual: ResidualAtZero,
) -> Result<PressureResult> {
    check_residual(model, material, residual)?;
    zero_temperature_integral(Kernel::Pressure, z, model, material, quad)
}

/// Ideal-metal energy per area at T = 0: −π²ħc / (720 z³).
pub fn ideal_energy_t0(z: f64) -> f64 {
    -PI * PI * CONSTANTS.hbar_c() / (720.0 * z.powi(3))
}

/// Ideal-metal pressure at T = 0: −π²ħc / (240 z⁴).
pub fn ideal_pressure_t0(z: f64) -> f64 {
    -PI * PI * CONSTANTS.hbar_c() / (240.0 * z.powi(4))
}

/// Energy per area at any T ≥ 0, dispatching to the T = 0 integral.
pub fn energy_at(
    pt: &EvaluationPoint,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<FreeEnergyResult> {
    if pt.temperature == 0.0 {
        zero_temperature_energy(pt.z, model, material, quad)
    } else {
        free_energy_per_area(pt, model, material, quad)
    }
}

pub fn pressure_at(
    pt: &EvaluationPoint,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<PressureResult> {
    if pt.temperature == 0.0 {
        zero_temperature_pressure(pt.z, model, material, quad)
    } else {
        pressure(pt, model, material, quad)
    }
}

/// Sphere–plate force in the proximity-force approximation, F = 2πR·F_pp, N.
pub fn pfa_sphere_force(
    pt: &EvaluationPoint,
    radius: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<LifshitzResult> {
    Geometry::SpherePlate { radius }.check(pt.z)?;
    Ok(energy_at(pt, model, material, quad)?.scaled(2.0 * PI * radius))
}

/// Plate–plate pressure or sphere–plate force, depending on the geometry.
pub fn geometry_quantity(
    pt: &EvaluationPoint,
    geometry: Geometry,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<LifshitzResult> {
    match geometry {
        Geometry::PlatePlate => pressure_at(pt, model, material, quad),
        Geometry::SpherePlate { radius } => pfa_sphere_force(pt, radius, model, material, quad),
    }
}

/// Pressures along a separation grid, evaluated in parallel; output order
/// follows the input.
pub fn pressure_curve(
    z_grid: &[f64],
    temperature: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<Vec<PressureResult>> {
    z_grid
        .par_iter()
        .map(|&z| pressure_at(&EvaluationPoint::new(z, temperature)?, model, material, quad))
        .collect()
}

/// P(z, T) / P_ideal(z, T = 0).
pub fn reduction_factor(
    pt: &EvaluationPoint,
    model: BoundaryModel,
    material: &MaterialSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let p = pressure_at(pt, model, material, quad)?;
    Ok(p.value / ideal_pressure_t0(pt.z))
}

/// Rounds to `digits` significant figures.
pub fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits as i32 - 1 - magnitude);
    (x * scale).round() / scale
}

/// Formats a value with `digits` significant figures.
pub fn format_significant(x: f64, digits: u32) -> String {
    let r = round_significant(x, digits);
    if r == 0.0 {
        return "0".to_string();
    }
    let magnitude = r.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{r:.decimals$}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThermalQuantity {
    Pressure,
    FreeEnergy,
    SphereForce { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalCorrection {
    pub quantity: ThermalQuantity,
    pub at_temperature: f64,
    pub at_zero: f64,
    /// Q(z, T) − Q(z, 0).
    pub absolute: f64,
    /// absolute / |Q(z, 0)|.
    pub relative: f64,
    /// The T = 0 Drude baseline of a perfect lattice is the plasma result.
    pub plasma_equivalent_baseline: bool,
}

pub fn thermal_correction(
    z: f64,
    temperature: f64,
    model: BoundaryModel,
    material: &MaterialSpec,
    quantity: ThermalQuantity,
    quad: &QuadratureSpec,
) -> Result<ThermalCorrection> {
    let pt = EvaluationPoint::new(z, temperature)?;
    pt.require_finite_temperature()?;
    // The baseline of an impure Drude metal is defined with ν(0) = ν_residual.
    let allow = ResidualAtZero::Allow;
    let (hot, cold) = match quantity {
        ThermalQuantity::Pressure => (
            pressure(&pt, model, material, quad)?.value,
            zero_temperature_pressure_with(z, model, material, quad, allow)?.value,
        ),
        ThermalQuantity::FreeEnergy => (
            free_energy_per_area(&pt, model, material, quad)?.value,
            zero_temperature_energy_with(z, model, material, quad, allow)?.value,
        ),
        ThermalQuantity::SphereForce { radius } => (
            pfa_sphere_force(&pt, radius, model, material, quad)?.value,
            2.0 * PI * radius * zero_temperature_energy_with(z, model, material, quad, allow)?.value,
        ),
    };
    let absolute = hot - cold;
    Ok(ThermalCorrection {
        quantity,
        at_temperature: hot,
        at_zero: cold,
        absolute,
        relative: absolute / cold.abs(),
        plasma_equivalent_baseline: model == BoundaryModel::Drude && material.is_perfect_lattice(),
    })
}
