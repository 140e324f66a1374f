//! Reflection coefficients on the imaginary frequency axis.
//!
//! Coefficients are signed; the Lifshitz integrands square them once.
//! The static (ξ = 0) term is never obtained by taking limits numerically:
//! each model has an explicit zero-frequency prescription, and that value of
//! the TE coefficient is exactly where the models disagree.

use crate::error::{Error, Result};
use crate::materials::{permittivity, surface_impedance, BoundaryModel, LowFrequencyExtension, MaterialSpec};
use crate::numerics::CONSTANTS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub r_tm: f64,
    pub r_te: f64,
}

impl ReflectionPair {
    pub const IDEAL: ReflectionPair = ReflectionPair { r_tm: 1.0, r_te: -1.0 };
    pub const TM_ONLY: ReflectionPair = ReflectionPair { r_tm: 1.0, r_te: 0.0 };
}

/// How the TE coefficient behaves at ξ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
enum StaticTe {
    Zero,
    Ideal,
    /// (ck − √(c²k² + ω_p²)) / (ck + √(c²k² + ω_p²))
    Plasma {
        omega_p: f64,
    },
    /// (ck − ω_p) / (ck + ω_p)
    Impedance {
        omega_p: f64,
    },
}

/// Material response at one imaginary frequency, ready to produce
/// reflection coefficients for any transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyResponse {
    /// Finite permittivity; stores χ = ε − 1 and (ξ/c)².
    Dielectric {
        chi: f64,
        xi_over_c_sq: f64,
    },
    /// Surface impedance Z(iξ) with ξ/c.
    Impedance {
        z: f64,
        xi_over_c: f64,
    },
    Ideal,
    Static(StaticResponse),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticResponse {
    te: StaticTe,
}

impl StaticResponse {
    pub fn pair(&self, k: f64) -> ReflectionPair {
        let c = CONSTANTS.c;
        let r_te = match self.te {
            StaticTe::Zero => 0.0,
            StaticTe::Ideal => -1.0,
            StaticTe::Plasma { omega_p } => {
                let ck = c * k;
                let s = ck.hypot(omega_p);
                // (ck - s)/(ck + s) without cancellation
                -omega_p * omega_p / ((ck + s) * (ck + s))
            }
            StaticTe::Impedance { omega_p } => {
                let ck = c * k;
                (ck - omega_p) / (ck + omega_p)
            }
        };
        ReflectionPair { r_tm: 1.0, r_te }
    }
}

impl FrequencyResponse {
    /// Coefficients at transverse wavenumber k, with q² = k² + ξ²/c².
    pub fn pair_from_q(&self, q: f64) -> ReflectionPair {
        match *self {
            FrequencyResponse::Dielectric { chi, xi_over_c_sq } => {
                let k_sq = (q * q - xi_over_c_sq).max(0.0);
                let eps = 1.0 + chi;
                let k1 = (q * q + chi * xi_over_c_sq).sqrt();
                let tm_den = eps * q + k1;
                let te_den = q + k1;
                ReflectionPair {
                    r_tm: chi * ((eps + 1.0) * k_sq + eps * xi_over_c_sq) / (tm_den * tm_den),
                    r_te: -chi * xi_over_c_sq / (te_den * te_den),
                }
            }
            FrequencyResponse::Impedance { z, xi_over_c } => {
                let zx = xi_over_c * z;
                ReflectionPair {
                    r_tm: (q - zx) / (q + zx),
                    r_te: (q * z - xi_over_c) / (q * z + xi_over_c),
                }
            }
            FrequencyResponse::Ideal => ReflectionPair::IDEAL,
            FrequencyResponse::Static(s) => s.pair(q),
        }
    }
}

/// A boundary model bound to a material at a fixed temperature. The
/// relaxation ν(T) is evaluated once here.
#[derive(Debug, Clone)]
pub struct Surface<'a> {
    model: BoundaryModel,
    material: &'a MaterialSpec,
    temperature: f64,
    nu: f64,
}

impl<'a> Surface<'a> {
    pub fn new(model: BoundaryModel, material: &'a MaterialSpec, temperature: f64) -> Result<Self> {
        model.check_material(material)?;
        let nu = match model {
            BoundaryModel::Drude | BoundaryModel::Tabulated => material.relaxation_radps(temperature)?,
            _ => 0.0,
        };
        Ok(Surface {
            model,
            material,
            temperature,
            nu,
        })
    }

    pub fn model(&self) -> BoundaryModel {
        self.model
    }

    pub fn material(&self) -> &MaterialSpec {
        self.material
    }

    /// Response at `xi` (rad/s). `xi = 0` selects the static prescription.
    pub fn response(&self, xi: f64) -> Result<FrequencyResponse> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::invalid("xi", format!("must be non-negative, got {xi}")));
        }
        if xi == 0.0 {
            return Ok(FrequencyResponse::Static(self.static_response()));
        }
        let wp = self.material.omega_p();
        let xi_over_c = xi / CONSTANTS.c;
        Ok(match self.model {
            BoundaryModel::Drude => FrequencyResponse::Dielectric {
                chi: wp * wp / (xi * (xi + self.nu)),
                xi_over_c_sq: xi_over_c * xi_over_c,
            },
            BoundaryModel::Plasma => FrequencyResponse::Dielectric {
                chi: wp * wp / (xi * xi),
                xi_over_c_sq: xi_over_c * xi_over_c,
            },
            BoundaryModel::Tabulated => {
                let eps = permittivity(BoundaryModel::Tabulated, self.material, xi, self.temperature)?;
                FrequencyResponse::Dielectric {
                    chi: eps - 1.0,
                    xi_over_c_sq: xi_over_c * xi_over_c,
                }
            }
            BoundaryModel::ImpedanceIr => FrequencyResponse::Impedance {
                z: surface_impedance(self.material, xi)?,
                xi_over_c,
            },
            BoundaryModel::IdealMetal | BoundaryModel::Mim => FrequencyResponse::Ideal,
        })
    }

    fn static_response(&self) -> StaticResponse {
        let omega_p = self.material.omega_p();
        let te = match self.model {
            BoundaryModel::Drude | BoundaryModel::Mim => StaticTe::Zero,
            BoundaryModel::Plasma => StaticTe::Plasma { omega_p },
            BoundaryModel::ImpedanceIr => StaticTe::Impedance { omega_p },
            BoundaryModel::IdealMetal => StaticTe::Ideal,
            BoundaryModel::Tabulated => match self.material.table().map(|t| t.extension()) {
                Some(LowFrequencyExtension::Plasma) => StaticTe::Plasma { omega_p },
                _ => StaticTe::Zero,
            },
        };
        StaticResponse { te }
    }
}

/// Reflection coefficients at ξ > 0 (rad/s) and transverse wavenumber k (1/m).
pub fn reflection_pair(
    model: BoundaryModel,
    material: &MaterialSpec,
    xi: f64,
    k: f64,
    temperature: f64,
) -> Result<ReflectionPair> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::invalid("k", format!("must be non-negative, got {k}")));
    }
    if xi == 0.0 {
        return zero_frequency_pair(model, material, k);
    }
    if !(xi > 0.0) {
        return Err(Error::invalid("xi", format!("must be positive, got {xi}")));
    }
    let surface = Surface::new(model, material, temperature)?;
    let xi_over_c = xi / CONSTANTS.c;
    let q = k.hypot(xi_over_c);
    Ok(surface.response(xi)?.pair_from_q(q))
}

/// Static (ξ = 0) reflection coefficients at k > 0.
pub fn zero_frequency_pair(model: BoundaryModel, material: &MaterialSpec, k: f64) -> Result<ReflectionPair> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid("k", format!("zero-frequency pair needs k > 0, got {k}")));
    }
    model.check_material(material)?;
    // Temperature is irrelevant for the static prescriptions.
    let surface = Surface {
        model,
        material,
        temperature: 0.0,
        nu: 0.0,
    };
    Ok(surface.static_response().pair(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matsubara_spacing;
    use approx::assert_relative_eq;

    const ANALYTIC: [BoundaryModel; 5] = [
        BoundaryModel::Drude,
        BoundaryModel::Plasma,
        BoundaryModel::ImpedanceIr,
        BoundaryModel::IdealMetal,
        BoundaryModel::Mim,
    ];

    fn k_grid() -> impl Iterator<Item = f64> {
        (0..=40).map(|i| 10f64.powf(4.0 + 4.0 * i as f64 / 40.0))
    }

    /// Textbook Fresnel forms, written independently of the stable
    /// rearrangements used by the implementation.
    fn naive_fresnel(eps: f64, xi: f64, k: f64) -> ReflectionPair {
        let c = CONSTANTS.c;
        let q = (k * k + xi * xi / (c * c)).sqrt();
        let k1 = (k * k + eps * xi * xi / (c * c)).sqrt();
        ReflectionPair {
            r_tm: (eps * q - k1) / (eps * q + k1),
            r_te: (q - k1) / (q + k1),
        }
    }

    #[test]
    fn matches_naive_fresnel() {
        let au = MaterialSpec::au_19a();
        for &xi_ev in &[0.05, 0.5, 5.0] {
            let xi = au.ev_to_radps(xi_ev);
            for k in k_grid() {
                let eps = permittivity(BoundaryModel::Drude, &au, xi, 300.0).unwrap();
                let want = naive_fresnel(eps, xi, k);
                let got = reflection_pair(BoundaryModel::Drude, &au, xi, k, 300.0).unwrap();
                assert_relative_eq!(got.r_tm, want.r_tm, max_relative = 1e-10);
                assert_relative_eq!(got.r_te, want.r_te, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn ideal_and_impedance_limits() {
        let au = MaterialSpec::au_19a();
        let xi = matsubara_spacing(300.0);
        for k in k_grid() {
            for m in [BoundaryModel::IdealMetal, BoundaryModel::Mim] {
                assert_eq!(reflection_pair(m, &au, xi, k, 300.0).unwrap(), ReflectionPair::IDEAL);
            }
            assert_eq!(
                zero_frequency_pair(BoundaryModel::IdealMetal, &au, k).unwrap(),
                ReflectionPair::IDEAL
            );
            // Z = 0
            let resp = FrequencyResponse::Impedance {
                z: 0.0,
                xi_over_c: xi / CONSTANTS.c,
            };
            let p = resp.pair_from_q(k.hypot(xi / CONSTANTS.c));
            assert_eq!(p, ReflectionPair::IDEAL);
        }
    }

    #[test]
    fn transparency_at_high_frequency() {
        let au = MaterialSpec::au_19a();
        let xi = 1e3 * au.omega_p();
        for k in k_grid() {
            let p = reflection_pair(BoundaryModel::Drude, &au, xi, k, 300.0).unwrap();
            assert!(p.r_tm.abs() < 1e-6 && p.r_te.abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn plasma_equals_relaxation_free_drude() {
        let clean = MaterialSpec::new("clean", 9.0, 0.0).unwrap();
        for i in 0..30 {
            let xi = clean.ev_to_radps(10f64.powf(-3.0 + 0.2 * i as f64));
            for k in k_grid() {
                let d = reflection_pair(BoundaryModel::Drude, &clean, xi, k, 300.0).unwrap();
                let p = reflection_pair(BoundaryModel::Plasma, &clean, xi, k, 300.0).unwrap();
                assert_relative_eq!(d.r_tm, p.r_tm, max_relative = 1e-14);
                assert_relative_eq!(d.r_te, p.r_te, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn zero_frequency_prescriptions() {
        let au = MaterialSpec::au_19a();
        for k in k_grid() {
            assert_eq!(
                zero_frequency_pair(BoundaryModel::Drude, &au, k).unwrap(),
                ReflectionPair::TM_ONLY
            );
            assert_eq!(
                zero_frequency_pair(BoundaryModel::Mim, &au, k).unwrap(),
                ReflectionPair::TM_ONLY
            );
            let ck = CONSTANTS.c * k;
            let wp = au.omega_p();
            let p = zero_frequency_pair(BoundaryModel::Plasma, &au, k).unwrap();
            let s = (ck * ck + wp * wp).sqrt();
            assert_relative_eq!(p.r_te, (ck - s) / (ck + s), max_relative = 1e-9);
            let z = zero_frequency_pair(BoundaryModel::ImpedanceIr, &au, k).unwrap();
            assert_relative_eq!(z.r_te, (ck - wp) / (ck + wp), max_relative = 1e-12);
        }
        let stiff = au.with_omega_p(1e8).unwrap();
        let p = zero_frequency_pair(BoundaryModel::Plasma, &stiff, 1e6).unwrap();
        assert!((p.r_te + 1.0).abs() < 1e-8);
        assert!(zero_frequency_pair(BoundaryModel::Drude, &au, 0.0).is_err());
    }

    #[test]
    fn tm_limit_is_uncontested() {
        let au = MaterialSpec::au_19a();
        let xi = 1e-6 * matsubara_spacing(300.0);
        for m in ANALYTIC {
            for k in k_grid() {
                let lim = reflection_pair(m, &au, xi, k, 300.0).unwrap();
                let stat = zero_frequency_pair(m, &au, k).unwrap();
                assert!((lim.r_tm - stat.r_tm).abs() < 1e-4, "{m} at k={k}");
            }
        }
    }

    #[test]
    fn te_dichotomy_drude_versus_plasma() {
        let au = MaterialSpec::au_19a();
        let xi = 1e-12 * matsubara_spacing(300.0);
        for k in k_grid() {
            let d = reflection_pair(BoundaryModel::Drude, &au, xi, k, 300.0).unwrap();
            assert!(d.r_te.abs() < 1e-4, "Drude TE limit at k={k}: {}", d.r_te);
            let p = reflection_pair(BoundaryModel::Plasma, &au, xi, k, 300.0).unwrap();
            let p0 = zero_frequency_pair(BoundaryModel::Plasma, &au, k).unwrap();
            assert!(p0.r_te < -0.01);
            assert!((p.r_te - p0.r_te).abs() < 1e-6);
            let z = reflection_pair(BoundaryModel::ImpedanceIr, &au, xi, k, 300.0).unwrap();
            let z0 = zero_frequency_pair(BoundaryModel::ImpedanceIr, &au, k).unwrap();
            assert!((z.r_te - z0.r_te).abs() < 1e-6);
        }
    }

    #[test]
    fn mim_differs_from_ideal_only_in_static_te() {
        let au = MaterialSpec::au_19a();
        for k in k_grid() {
            let a = zero_frequency_pair(BoundaryModel::Mim, &au, k).unwrap();
            let b = zero_frequency_pair(BoundaryModel::IdealMetal, &au, k).unwrap();
            assert_eq!(a.r_tm, b.r_tm);
            assert_ne!(a.r_te, b.r_te);
        }
    }

    #[test]
    fn magnitudes_decrease_with_frequency() {
        // Drude TE is left out: its magnitude grows from the static value 0
        // while ξ/c < k and ξ(ξ+ν)⁻¹ is still rising.
        let au = MaterialSpec::au_19a();
        for m in [BoundaryModel::Drude, BoundaryModel::Plasma] {
            for k in k_grid() {
                let mut prev: Option<ReflectionPair> = None;
                for i in 0..60 {
                    let xi_ev = 10f64.powf(-4.0 + 0.1 * i as f64);
                    let p = reflection_pair(m, &au, au.ev_to_radps(xi_ev), k, 300.0).unwrap();
                    if let Some(q) = prev {
                        assert!(p.r_tm.abs() <= q.r_tm.abs() + 1e-15, "{m} TM at k={k}");
                        if m == BoundaryModel::Plasma {
                            assert!(p.r_te.abs() <= q.r_te.abs() + 1e-15, "{m} TE at k={k}");
                        }
                    }
                    prev = Some(p);
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn coefficients_bounded(lxi in -4.0f64..3.0, lk in 3.0f64..9.0, which in 0usize..5) {
            let au = MaterialSpec::au_19a();
            let xi = au.ev_to_radps(10f64.powf(lxi));
            let p = reflection_pair(ANALYTIC[which], &au, xi, 10f64.powf(lk), 300.0).unwrap();
            proptest::prop_assert!(p.r_tm.abs() <= 1.0 && p.r_te.abs() <= 1.0);
        }
    }
}
