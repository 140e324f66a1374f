//! Metal descriptions and their response on the imaginary frequency axis.
//!
//! A [`MaterialSpec`] carries the plasma frequency and a relaxation law
//! ν(T) = ν_residual + ν_BG(T), where the Bloch–Grüneisen part is calibrated
//! to reproduce the reference relaxation at `t_ref` and vanishes at T = 0.
//! Frequencies are stored in eV and converted to rad/s with the material's
//! [`EvConversion`].

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, EvConversion, QuadratureSpec};

/// Reflection prescription used for a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryModel {
    Drude,
    Plasma,
    ImpedanceIr,
    IdealMetal,
    Mim,
    Tabulated,
}

impl BoundaryModel {
    pub const ALL: [BoundaryModel; 6] = [
        BoundaryModel::Drude,
        BoundaryModel::Plasma,
        BoundaryModel::ImpedanceIr,
        BoundaryModel::IdealMetal,
        BoundaryModel::Mim,
        BoundaryModel::Tabulated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryModel::Drude => "drude",
            BoundaryModel::Plasma => "plasma",
            BoundaryModel::ImpedanceIr => "impedance-ir",
            BoundaryModel::IdealMetal => "ideal-metal",
            BoundaryModel::Mim => "mim",
            BoundaryModel::Tabulated => "tabulated",
        }
    }

    /// Models described by a finite ε(iξ).
    pub fn has_permittivity(self) -> bool {
        matches!(
            self,
            BoundaryModel::Drude | BoundaryModel::Plasma | BoundaryModel::Tabulated
        )
    }

    pub fn check_material(self, material: &MaterialSpec) -> Result<()> {
        if self == BoundaryModel::Tabulated && material.table().is_none() {
            return Err(Error::invalid(
                "model",
                format!("tabulated model needs a permittivity table for {}", material.name()),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for BoundaryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        BoundaryModel::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .or(match lower.as_str() {
                "impedance" | "impedanceir" => Some(BoundaryModel::ImpedanceIr),
                "ideal" | "im" => Some(BoundaryModel::IdealMetal),
                _ => None,
            })
            .ok_or_else(|| Error::invalid("model", format!("unknown boundary model '{s}'")))
    }
}

/// How a tabulated permittivity is continued below its lowest frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowFrequencyExtension {
    /// Drude form with the material's ω_p and ν(T); no TE zero-frequency term.
    #[default]
    Drude,
    /// Dissipationless plasma form.
    Plasma,
}

/// Validated ε(iξ) samples, ascending in ξ (eV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermittivityTable {
    points: Vec<(f64, f64)>,
    #[serde(default)]
    extension: LowFrequencyExtension,
}

impl PermittivityTable {
    pub const MIN_ROWS: usize = 8;

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < Self::MIN_ROWS {
            return Err(Error::Table {
                row: points.len(),
                reason: format!("insufficient rows: need at least {}", Self::MIN_ROWS),
            });
        }
        for (i, &(xi, eps)) in points.iter().enumerate() {
            let row = i + 1;
            if !(xi > 0.0) || !xi.is_finite() {
                return Err(Error::Table {
                    row,
                    reason: format!("xi must be positive, got {xi}"),
                });
            }
            if !(eps >= 1.0) || !eps.is_finite() {
                return Err(Error::Table {
                    row,
                    reason: format!("eps must be at least 1, got {eps}"),
                });
            }
            if i > 0 && xi <= points[i - 1].0 {
                return Err(Error::Table {
                    row,
                    reason: format!("xi not strictly ascending ({xi} after {})", points[i - 1].0),
                });
            }
        }
        Ok(PermittivityTable {
            points,
            extension: LowFrequencyExtension::default(),
        })
    }

    pub fn with_extension(mut self, extension: LowFrequencyExtension) -> Self {
        self.extension = extension;
        self
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn extension(&self) -> LowFrequencyExtension {
        self.extension
    }

    pub fn xi_range_ev(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    /// Interpolates ln(ε − 1) linearly in ln ξ; falls back to linear ε where
    /// a bracketing sample has ε = 1. `None` outside the table range.
    pub fn interpolate(&self, xi_ev: f64) -> Option<f64> {
        let (lo, hi) = self.xi_range_ev();
        if xi_ev < lo || xi_ev > hi {
            return None;
        }
        let idx = self.points.partition_point(|p| p.0 < xi_ev);
        if idx < self.points.len() && self.points[idx].0 == xi_ev {
            return Some(self.points[idx].1);
        }
        let (x0, e0) = self.points[idx - 1];
        let (x1, e1) = self.points[idx];
        if e0 > 1.0 && e1 > 1.0 {
            let s = (xi_ev / x0).ln() / (x1 / x0).ln();
            let ln_chi = (e0 - 1.0).ln() + s * ((e1 - 1.0).ln() - (e0 - 1.0).ln());
            Some(1.0 + ln_chi.exp())
        } else {
            let s = (xi_ev - x0) / (x1 - x0);
            Some(e0 + s * (e1 - e0))
        }
    }
}

/// Parses a `xi_ev,eps` CSV stream. Lines starting with `#` are ignored.
pub fn load_permittivity_table<R: Read>(source: R) -> Result<PermittivityTable> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(source);
    let headers = reader.headers().map_err(|e| Error::Table {
        row: 1,
        reason: e.to_string(),
    })?;
    if !headers.is_empty() {
        let names: Vec<&str> = headers.iter().collect();
        if names != ["xi_ev", "eps"] {
            return Err(Error::Table {
                row: 1,
                reason: format!("expected header 'xi_ev,eps', got '{}'", names.join(",")),
            });
        }
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Table {
            row: e.position().map_or(0, |p| p.line() as usize),
            reason: format!("malformed row: {e}"),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::Table {
                row,
                reason: format!("malformed row: expected 2 fields, found {}", record.len()),
            });
        }
        let parse = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| Error::Table {
                row,
                reason: format!("malformed row: '{}' is not a number", &record[i]),
            })
        };
        let xi = parse(0)?;
        let eps = parse(1)?;
        if !(eps >= 1.0) {
            return Err(Error::Table {
                row,
                reason: format!("eps must be at least 1, got {eps}"),
            });
        }
        if let Some(&(prev, _)) = points.last() {
            if xi <= prev {
                return Err(Error::Table {
                    row,
                    reason: format!("xi not strictly ascending ({xi} after {prev})"),
                });
            }
        }
        points.push((xi, eps));
    }
    if points.len() < PermittivityTable::MIN_ROWS {
        return Err(Error::Table {
            row: points.len(),
            reason: format!(
                "insufficient rows: {} data rows, need at least {}",
                points.len(),
                PermittivityTable::MIN_ROWS
            ),
        });
    }
    PermittivityTable::new(points)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialConfig {
    name: String,
    omega_p_ev: f64,
    nu_ref_ev: f64,
    #[serde(default = "default_t_ref")]
    t_ref: f64,
    #[serde(default)]
    nu_residual_ev: f64,
    #[serde(default = "default_theta_debye")]
    theta_debye: f64,
    #[serde(default)]
    conversion: EvConversion,
    #[serde(default)]
    table: Option<PermittivityTable>,
}

fn default_t_ref() -> f64 {
    300.0
}

fn default_theta_debye() -> f64 {
    MaterialSpec::AU_DEBYE_TEMPERATURE
}

impl TryFrom<MaterialConfig> for MaterialSpec {
    type Error = Error;

    fn try_from(c: MaterialConfig) -> Result<Self> {
        let mut m = MaterialSpec::with_parameters(
            c.name,
            c.omega_p_ev,
            c.nu_ref_ev,
            c.t_ref,
            c.nu_residual_ev,
            c.theta_debye,
        )?
        .with_conversion(c.conversion);
        if let Some(t) = c.table {
            m = m.with_table(PermittivityTable::new(t.points)?.with_extension(t.extension));
        }
        Ok(m)
    }
}

impl From<MaterialSpec> for MaterialConfig {
    fn from(m: MaterialSpec) -> Self {
        MaterialConfig {
            name: m.name,
            omega_p_ev: m.omega_p_ev,
            nu_ref_ev: m.nu_ref_ev,
            t_ref: m.t_ref,
            nu_residual_ev: m.nu_residual_ev,
            theta_debye: m.theta_debye,
            conversion: m.conversion,
            table: m.table,
        }
    }
}

/// Immutable description of a metal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialConfig", into = "MaterialConfig")]
pub struct MaterialSpec {
    name: String,
    omega_p_ev: f64,
    nu_ref_ev: f64,
    t_ref: f64,
    nu_residual_ev: f64,
    theta_debye: f64,
    conversion: EvConversion,
    table: Option<PermittivityTable>,
    /// Bloch–Grüneisen amplitude, eV.
    bg_amplitude_ev: f64,
}

impl MaterialSpec {
    /// Handbook Debye temperature of gold, K.
    pub const AU_DEBYE_TEMPERATURE: f64 = 165.0;

    pub fn new(name: impl Into<String>, omega_p_ev: f64, nu_ref_ev: f64) -> Result<Self> {
        Self::with_parameters(name, omega_p_ev, nu_ref_ev, 300.0, 0.0, Self::AU_DEBYE_TEMPERATURE)
    }

    pub fn with_parameters(
        name: impl Into<String>,
        omega_p_ev: f64,
        nu_ref_ev: f64,
        t_ref: f64,
        nu_residual_ev: f64,
        theta_debye: f64,
    ) -> Result<Self> {
        if !(omega_p_ev > 0.0) || !omega_p_ev.is_finite() {
            return Err(Error::invalid("omega_p", format!("must be positive, got {omega_p_ev}")));
        }
        if !(nu_ref_ev >= 0.0) || !nu_ref_ev.is_finite() {
            return Err(Error::invalid(
                "nu_ref",
                format!("must be non-negative, got {nu_ref_ev}"),
            ));
        }
        if !(nu_residual_ev >= 0.0) || !nu_residual_ev.is_finite() {
            return Err(Error::invalid(
                "nu_residual",
                format!("must be non-negative, got {nu_residual_ev}"),
            ));
        }
        if nu_residual_ev > nu_ref_ev {
            return Err(Error::invalid(
                "nu_residual",
                format!("residual relaxation {nu_residual_ev} eV exceeds nu_ref {nu_ref_ev} eV"),
            ));
        }
        if !(theta_debye > 0.0) || !theta_debye.is_finite() {
            return Err(Error::invalid(
                "theta_D",
                format!("must be positive, got {theta_debye}"),
            ));
        }
        if !(t_ref > 0.0) || !t_ref.is_finite() {
            return Err(Error::invalid("T_ref", format!("must be positive, got {t_ref}")));
        }
        let shape = bloch_gruneisen_shape(t_ref, theta_debye)?;
        let bg_amplitude_ev = (nu_ref_ev - nu_residual_ev) / shape;
        Ok(MaterialSpec {
            name: name.into(),
            omega_p_ev,
            nu_ref_ev,
            t_ref,
            nu_residual_ev,
            theta_debye,
            conversion: EvConversion::Standard,
            table: None,
            bg_amplitude_ev,
        })
    }

    /// Au with ω_p = 9.00 eV, ν(300 K) = 0.0350 eV.
    pub fn au_19a() -> Self {
        Self::new("au-19a", 9.00, 0.0350).expect("valid built-in material")
    }

    /// Au with ω_p = 9.03 eV, ν(300 K) = 0.0345 eV.
    pub fn au_7() -> Self {
        Self::new("au-7", 9.03, 0.0345).expect("valid built-in material")
    }

    /// Copper with illustrative textbook-scale values. Not calibrated
    /// against any measurement used elsewhere in this crate.
    pub fn cu_example() -> Self {
        Self::with_parameters("cu-example", 8.97, 0.0335, 300.0, 0.0, 343.0).expect("valid built-in material")
    }

    /// Looks up a built-in material by alias.
    pub fn builtin(alias: &str) -> Option<Self> {
        match alias {
            "au-19a" | "au" => Some(Self::au_19a()),
            "au-7" => Some(Self::au_7()),
            "cu-example" => Some(Self::cu_example()),
            _ => None,
        }
    }

    /// Same metal with a different impurity relaxation; the Bloch–Grüneisen
    /// amplitude is recalibrated so that ν(T_ref) is unchanged.
    pub fn with_residual(&self, nu_residual_ev: f64) -> Result<Self> {
        let mut m = Self::with_parameters(
            self.name.clone(),
            self.omega_p_ev,
            self.nu_ref_ev,
            self.t_ref,
            nu_residual_ev,
            self.theta_debye,
        )?;
        m.conversion = self.conversion;
        m.table = self.table.clone();
        Ok(m)
    }

    pub fn with_debye_temperature(&self, theta_debye: f64) -> Result<Self> {
        let mut m = Self::with_parameters(
            self.name.clone(),
            self.omega_p_ev,
            self.nu_ref_ev,
            self.t_ref,
            self.nu_residual_ev,
            theta_debye,
        )?;
        m.conversion = self.conversion;
        m.table = self.table.clone();
        Ok(m)
    }

    pub fn with_omega_p(&self, omega_p_ev: f64) -> Result<Self> {
        let mut m = Self::with_parameters(
            self.name.clone(),
            omega_p_ev,
            self.nu_ref_ev,
            self.t_ref,
            self.nu_residual_ev,
            self.theta_debye,
        )?;
        m.conversion = self.conversion;
        m.table = self.table.clone();
        Ok(m)
    }

    pub fn with_conversion(mut self, conversion: EvConversion) -> Self {
        self.conversion = conversion;
        self
    }

    pub fn with_table(mut self, table: PermittivityTable) -> Self {
        self.table = Some(table);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn omega_p_ev(&self) -> f64 {
        self.omega_p_ev
    }
    pub fn nu_ref_ev(&self) -> f64 {
        self.nu_ref_ev
    }
    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }
    pub fn nu_residual_ev(&self) -> f64 {
        self.nu_residual_ev
    }
    pub fn theta_debye(&self) -> f64 {
        self.theta_debye
    }
    pub fn conversion(&self) -> EvConversion {
        self.conversion
    }
    pub fn table(&self) -> Option<&PermittivityTable> {
        self.table.as_ref()
    }

    /// Plasma frequency in rad/s.
    pub fn omega_p(&self) -> f64 {
        self.omega_p_ev * self.conversion.factor()
    }

    pub fn ev_to_radps(&self, ev: f64) -> f64 {
        ev * self.conversion.factor()
    }

    pub fn radps_to_ev(&self, radps: f64) -> f64 {
        radps / self.conversion.factor()
    }

    /// True when the relaxation vanishes at T = 0.
    pub fn is_perfect_lattice(&self) -> bool {
        self.nu_residual_ev == 0.0
    }

    /// Relaxation ν(T) in rad/s.
    pub fn relaxation_radps(&self, temperature: f64) -> Result<f64> {
        Ok(self.ev_to_radps(relaxation(self, temperature)?))
    }
}

/// x⁵eˣ/(eˣ−1)² integrated from 0 to `upper`.
fn bloch_gruneisen_integral(upper: f64) -> Result<f64> {
    // Beyond this the remaining tail is below 1e-20 of the full value 5!ζ(5).
    let upper = upper.min(80.0);
    let spec = QuadratureSpec {
        rel_tol: 1e-12,
        abs_floor: 0.0,
        max_subdivisions: 200,
    };
    let f = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let em = (-x).exp();
        x.powi(5) * em / ((1.0 - em) * (1.0 - em))
    };
    Ok(integrate_interval(f, 0.0, upper, &spec)?.value)
}

/// (T/θ)⁵ J₅(θ/T); zero at T = 0.
fn bloch_gruneisen_shape(temperature: f64, theta: f64) -> Result<f64> {
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let r = temperature / theta;
    Ok(r.powi(5) * bloch_gruneisen_integral(1.0 / r)?)
}

/// Relaxation ν(T) in eV: impurity residual plus the Bloch–Grüneisen part.
pub fn relaxation(material: &MaterialSpec, temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("must be non-negative, got {temperature} K"),
        ));
    }
    if temperature == material.t_ref {
        return Ok(material.nu_ref_ev);
    }
    let bg = material.bg_amplitude_ev * bloch_gruneisen_shape(temperature, material.theta_debye)?;
    Ok(material.nu_residual_ev + bg)
}

/// Dielectric permittivity ε(iξ) for models with a finite permittivity.
/// `xi` is in rad/s and must be positive.
pub fn permittivity(model: BoundaryModel, material: &MaterialSpec, xi: f64, temperature: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::invalid(
            "xi",
            format!("permittivity needs xi > 0, got {xi}; use the zero-frequency prescription"),
        ));
    }
    let wp = material.omega_p();
    match model {
        BoundaryModel::Drude => {
            let nu = material.relaxation_radps(temperature)?;
            Ok(drude_form(wp, nu, xi))
        }
        BoundaryModel::Plasma => Ok(drude_form(wp, 0.0, xi)),
        BoundaryModel::Tabulated => {
            let table = material
                .table()
                .ok_or_else(|| Error::invalid("model", "tabulated model needs a permittivity table"))?;
            let xi_ev = material.radps_to_ev(xi);
            let (lo, hi) = table.xi_range_ev();
            if xi_ev < lo {
                return match table.extension() {
                    LowFrequencyExtension::Drude => {
                        let nu = material.relaxation_radps(temperature)?;
                        Ok(drude_form(wp, nu, xi))
                    }
                    LowFrequencyExtension::Plasma => Ok(drude_form(wp, 0.0, xi)),
                };
            }
            table.interpolate(xi_ev).ok_or_else(|| {
                Error::invalid(
                    "xi",
                    format!("{xi_ev:.4} eV lies above the permittivity table (max {hi} eV)"),
                )
            })
        }
        BoundaryModel::ImpedanceIr | BoundaryModel::IdealMetal | BoundaryModel::Mim => Err(Error::invalid(
            "model",
            format!("{model} has no finite permittivity; use reflection coefficients"),
        )),
    }
}

#[inline]
fn drude_form(wp: f64, nu: f64, xi: f64) -> f64 {
    1.0 + wp * wp / (xi * (xi + nu))
}

/// Free-electron surface impedance Z(iξ) = ξ/√(ξ² + ω_p²), `xi` in rad/s.
pub fn surface_impedance(material: &MaterialSpec, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) || !xi.is_finite() {
        return Err(Error::invalid("xi", format!("must be non-negative, got {xi}")));
    }
    let wp = material.omega_p();
    Ok(xi / xi.hypot(wp))
}
