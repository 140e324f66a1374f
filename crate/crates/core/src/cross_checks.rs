//! Cross-module checks: thermodynamic consistency between pressure and free
//! energy, the proximity-force map, and the comparison pipeline end to end.

use std::f64::consts::PI;
use std::time::Instant;

use crate::compare::{
    apply_separation_shift, load_dataset, synthesize_dataset, theory_minus_experiment, CachedTheory, DatasetKind,
    LifshitzTheory, NoiseProfile, Theory,
};
use crate::lifshitz::{energy_at, free_energy_per_area, pfa_sphere_force, pressure, pressure_at};
use crate::materials::PermittivityTable;
use crate::numerics::richardson_derivative;
use crate::{BoundaryModel, EvaluationPoint, MaterialSpec, QuadratureSpec, CONSTANTS};
use proptest::prelude::*;

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

const MODELS: [BoundaryModel; 5] = [
    BoundaryModel::Drude,
    BoundaryModel::Plasma,
    BoundaryModel::ImpedanceIr,
    BoundaryModel::IdealMetal,
    BoundaryModel::Mim,
];

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    /// P = −∂F/∂z at fixed T.
    #[test]
    fn pressure_is_minus_energy_gradient(
        log_z in (150e-9f64).ln()..(3e-6f64).ln(),
        t in 10.0f64..600.0,
        m in 0usize..MODELS.len(),
    ) {
        let z = log_z.exp();
        let au = MaterialSpec::au_19a();
        let model = MODELS[m];
        let f = |zz: f64| free_energy_per_area(&EvaluationPoint::new(zz, t)?, model, &au, &q()).map(|r| r.value);
        let d = richardson_derivative(f, z, 1e-3 * z).unwrap();
        let p = pressure(&EvaluationPoint::new(z, t).unwrap(), model, &au, &q()).unwrap().value;
        prop_assert!(((-d.value - p) / p).abs() < 1e-6, "z {z:e} T {t} {model}: {} vs {p}", -d.value);
    }
}

#[test]
fn proximity_force_matches_ideal_closed_form() {
    let au = MaterialSpec::au_19a();
    let radius = 150e-6;
    for z in [200e-9, 700e-9, 1.2e-6] {
        let pt = EvaluationPoint::new(z, 0.0).unwrap();
        let f = pfa_sphere_force(&pt, radius, BoundaryModel::IdealMetal, &au, &q())
            .unwrap()
            .value;
        let closed = -PI.powi(3) * CONSTANTS.hbar_c() * radius / (360.0 * z.powi(3));
        assert!(((f - closed) / closed).abs() < 1e-8, "{f} vs {closed}");
        // at finite T the same 2πR map applies to the free energy
        let hot = EvaluationPoint::new(z, 300.0).unwrap();
        let f = pfa_sphere_force(&hot, radius, BoundaryModel::Drude, &au, &q())
            .unwrap()
            .value;
        let e = energy_at(&hot, BoundaryModel::Drude, &au, &q()).unwrap().value;
        assert!((f - 2.0 * PI * radius * e).abs() < 1e-14 * f.abs());
    }
    let pt = EvaluationPoint::new(1e-6, 300.0).unwrap();
    assert!(pfa_sphere_force(&pt, 50e-6, BoundaryModel::Drude, &au, &q()).is_err());
}

#[test]
fn tabulated_drude_reproduces_analytic_drude() {
    let au = MaterialSpec::au_19a();
    let t = 300.0;
    let nu = au.radps_to_ev(au.relaxation_radps(t).unwrap());
    let wp = au.omega_p_ev();
    let points: Vec<(f64, f64)> = (0..=300)
        .map(|i| {
            let xi = 10f64.powf(-3.0 + 6.0 * i as f64 / 300.0);
            (xi, 1.0 + wp * wp / (xi * (xi + nu)))
        })
        .collect();
    let tab = au.clone().with_table(PermittivityTable::new(points).unwrap());
    for z in [160e-9, 400e-9, 1e-6] {
        let pt = EvaluationPoint::new(z, t).unwrap();
        let a = pressure_at(&pt, BoundaryModel::Tabulated, &tab, &q()).unwrap().value;
        let b = pressure_at(&pt, BoundaryModel::Drude, &au, &q()).unwrap().value;
        assert!(((a - b) / b).abs() < 1e-3, "{z}: {a} vs {b}");
    }
}

#[test]
fn full_scale_dataset_loads_quickly() {
    let mut text = String::from("z_nm,value_mPa,sigma_mPa\n");
    for i in 0..4066 {
        let z = 160.0 + 540.0 * i as f64 / 4065.0;
        text.push_str(&format!("{z},{},{}\n", -1e12 / z.powi(4), 0.5 + (i % 7) as f64 * 0.1));
    }
    let start = Instant::now();
    let ds = load_dataset(text.as_bytes(), DatasetKind::Pressure, "big").unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(ds.len(), 4066);
    assert!(elapsed < 1.0, "{elapsed} s");
}

#[test]
fn self_comparison_is_within_numeric_error() {
    let au = MaterialSpec::au_19a();
    let theory = LifshitzTheory::plates(BoundaryModel::Drude, au, 300.0).unwrap();
    let grid: Vec<f64> = (0..40).map(|i| (250.0 + 10.0 * i as f64) / 1e9).collect();
    let ds = synthesize_dataset(&theory, &grid, &NoiseProfile::Constant { sigma: 0.0 }, 5, "exact").unwrap();
    let series = theory_minus_experiment(&ds, &theory).unwrap();
    assert_eq!(series.records.len(), ds.len());
    for (d, r) in series.records.iter().zip(ds.records()) {
        assert!(d.diff.abs() <= d.sigma.max(1e-15 * r.value.abs()));
        assert!(d.sigma >= r.sigma);
    }
    let single = synthesize_dataset(&theory, &grid[..1], &NoiseProfile::Constant { sigma: 0.0 }, 5, "one").unwrap();
    assert_eq!(theory_minus_experiment(&single, &theory).unwrap().records.len(), 1);
}

#[test]
fn shifted_data_is_compared_at_shifted_separations() {
    let au = MaterialSpec::au_19a();
    let theory = CachedTheory::new(LifshitzTheory::plates(BoundaryModel::Plasma, au, 300.0).unwrap());
    let grid: Vec<f64> = (0..12).map(|i| (300.0 + 5.0 * i as f64) / 1e9).collect();
    let ds = synthesize_dataset(&theory, &grid, &NoiseProfile::Constant { sigma: 1e-4 }, 2, "s").unwrap();
    let shifted = apply_separation_shift(&ds, -1e-9).unwrap();
    let series = theory_minus_experiment(&shifted, &theory).unwrap();
    for (d, r) in series.records.iter().zip(shifted.records()) {
        let expected = theory.evaluate(r.z).unwrap().0 - r.value;
        assert_eq!(d.z, r.z);
        assert!((d.diff - expected).abs() < 1e-15);
    }
}

#[test]
fn geometry_must_match_dataset_kind() {
    let au = MaterialSpec::au_19a();
    let plates = LifshitzTheory::plates(BoundaryModel::Drude, au.clone(), 300.0).unwrap();
    let sphere = LifshitzTheory::new(
        BoundaryModel::Drude,
        au,
        crate::Geometry::SpherePlate { radius: 150e-6 },
        300.0,
        q(),
    )
    .unwrap();
    let grid = [300e-9, 310e-9];
    let ds = synthesize_dataset(&plates, &grid, &NoiseProfile::Constant { sigma: 0.0 }, 0, "p").unwrap();
    assert!(theory_minus_experiment(&ds, &sphere).is_err());
    let fs = synthesize_dataset(&sphere, &grid, &NoiseProfile::Constant { sigma: 1e-15 }, 0, "f").unwrap();
    assert_eq!(fs.kind(), DatasetKind::Force);
    assert!(theory_minus_experiment(&fs, &sphere).is_ok());
}
