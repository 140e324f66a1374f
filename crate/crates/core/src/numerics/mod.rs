//! Physical constants, unit conversion, Matsubara frequencies and the
//! quadrature/differentiation engines shared by the physics modules.

mod derivative;
mod quadrature;

pub use derivative::{default_temperature_step, derivative_in_t, richardson_derivative, Derivative};
pub use quadrature::{integrate_decaying, integrate_interval, Integral, QuadratureSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Riemann ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// eV → rad/s factor used by the erroneous legacy permittivity tables.
/// Kept only to reproduce results that were computed with it.
pub const LEGACY_EV_TO_RADPS: f64 = 1.537e15;

/// Fundamental constants in SI units plus the eV → rad/s conversion factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light, m/s.
    pub c: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Angular frequency of a 1 eV photon, rad/s.
    pub ev_to_radps: f64,
}

impl PhysicalConstants {
    pub const STANDARD: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        c: 2.997_924_58e8,
        k_b: 1.380_649e-23,
        ev_to_radps: 1.519_27e15,
    };

    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }
}

/// Constants used throughout the crate.
pub const CONSTANTS: PhysicalConstants = PhysicalConstants::STANDARD;

/// Choice of the eV → rad/s factor applied to material parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvConversion {
    /// 1.51927e15 rad/s per eV.
    #[default]
    Standard,
    /// 1.537e15 rad/s per eV (erroneous; reproduction studies only).
    Legacy,
}

impl EvConversion {
    pub fn factor(self) -> f64 {
        match self {
            EvConversion::Standard => CONSTANTS.ev_to_radps,
            EvConversion::Legacy => LEGACY_EV_TO_RADPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyDirection {
    EvToRadps,
    RadpsToEv,
}

/// Converts a frequency between eV and rad/s with the standard factor.
pub fn convert_frequency(value: f64, direction: FrequencyDirection) -> Result<f64> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::invalid(
            "frequency",
            format!("expected a finite non-negative value, got {value}"),
        ));
    }
    Ok(match direction {
        FrequencyDirection::EvToRadps => value * CONSTANTS.ev_to_radps,
        FrequencyDirection::RadpsToEv => value / CONSTANTS.ev_to_radps,
    })
}

/// One term of a primed Matsubara sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraTerm {
    pub index: u64,
    /// Imaginary frequency ξ_l, rad/s.
    pub xi: f64,
    /// 1/2 for the static term, 1 otherwise.
    pub weight: f64,
}

/// Spacing ξ_1 = 2π k_B T / ħ of the Matsubara frequencies, rad/s.
pub fn matsubara_spacing(temperature: f64) -> f64 {
    2.0 * std::f64::consts::PI * CONSTANTS.k_b * temperature / CONSTANTS.hbar
}

pub fn matsubara_xi(index: u64, temperature: f64) -> Result<MatsubaraTerm> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("Matsubara frequencies need T > 0, got {temperature} K"),
        ));
    }
    Ok(MatsubaraTerm {
        index,
        xi: matsubara_spacing(temperature) * index as f64,
        weight: primed_weight(index),
    })
}

#[inline]
pub fn primed_weight(index: u64) -> f64 {
    if index == 0 {
        0.5
    } else {
        1.0
    }
}
