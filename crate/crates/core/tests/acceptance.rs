//! Acceptance criteria A1–A12. Each test writes one `A<n> PASS|FAIL` line to
//! stdout (bypassing the harness capture) and then asserts the verdict.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use casimir_core::compare::{
    apply_separation_shift, confidence_band, exclusion_verdict, propagate_separation_error, synthesize_dataset,
    theory_minus_experiment, CachedTheory, Dataset, LifshitzTheory, NoiseProfile, Theory, DEFAULT_BIN_WIDTH,
    LADDER_NOISE_SCALE,
};
use casimir_core::lifshitz::{
    free_energy_per_area, pfa_sphere_force, pressure, pressure_curve, thermal_correction, ThermalQuantity,
};
use casimir_core::thermo::{
    entropy, mim_entropy_t0, nernst_scan, perfect_drude_entropy_t0, static_te_deficit_integral, static_te_entropy,
    DEFAULT_NERNST_GRID,
};
use casimir_core::{BoundaryModel, EvaluationPoint, MaterialSpec, QuadratureSpec, CONSTANTS, ZETA3};

fn report(id: &str, pass: bool, detail: String) {
    let line = format!("\n{id} {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "{id} failed: {detail}");
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn au() -> MaterialSpec {
    MaterialSpec::au_19a()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn a01_static_te_deficit_ideal_limit() {
    let start = Instant::now();
    let z = 1e-6;
    let a = 1e4;
    // ω_p chosen so that 2 ω_p z / c = 10⁴
    let wp_ev = a * CONSTANTS.c / (2.0 * z) / CONSTANTS.ev_to_radps;
    let material = au().with_omega_p(wp_ev).unwrap();
    let s = perfect_drude_entropy_t0(z, &material, &q()).unwrap();
    let direct = CONSTANTS.k_b / (16.0 * PI * z * z) * static_te_deficit_integral(a, &q()).unwrap();
    let target = -ZETA3 * CONSTANTS.k_b / (16.0 * PI * z * z);
    let elapsed = start.elapsed().as_secs_f64();
    let err = rel(s, target);
    report(
        "A1",
        err < 1e-3 && rel(direct, s) < 1e-10 && elapsed < 1.0,
        format!("S(a=1e4) = {s:.6e}, -ζ(3)k_B/16πz² = {target:.6e}, rel {err:.2e} (tol 1e-3), {elapsed:.3} s (< 1 s)"),
    );
}

#[test]
fn a02_mim_free_energy_identity() {
    let mut worst: f64 = 0.0;
    for z in [0.5e-6, 1e-6, 2e-6] {
        for t in [77.0, 300.0, 600.0] {
            let pt = EvaluationPoint::new(z, t).unwrap();
            let mim = free_energy_per_area(&pt, BoundaryModel::Mim, &au(), &q())
                .unwrap()
                .value;
            let im = free_energy_per_area(&pt, BoundaryModel::IdealMetal, &au(), &q())
                .unwrap()
                .value;
            let term = ZETA3 * CONSTANTS.k_b * t / (16.0 * PI * z * z);
            worst = worst.max(rel(mim - im, term));
        }
    }
    report(
        "A2",
        worst < 1e-8,
        format!("max rel |(F_MIM − F_IM) − ζ(3)k_BT/16πz²| = {worst:.2e} over 9 points (tol 1e-8)"),
    );
}

#[test]
fn a03_mim_entropy_at_two_kelvin() {
    let s = entropy(500e-9, 2.0, BoundaryModel::Mim, &au(), &q()).unwrap();
    let err = rel(s.value, -1.3207e-12);
    report(
        "A3",
        err < 0.01 && (mim_entropy_t0(500e-9) + 1.3207e-12).abs() < 1e-16,
        format!(
            "S_MIM(500 nm, 2 K) = {:.5e} J/(K·m²) vs −1.3207e-12, rel {err:.2e} (tol 1e-2)",
            s.value
        ),
    );
}

#[test]
fn a04_ideal_metal_thermal_correction() {
    let z = 1e-6;
    let p = thermal_correction(
        z,
        300.0,
        BoundaryModel::IdealMetal,
        &au(),
        ThermalQuantity::Pressure,
        &q(),
    )
    .unwrap();
    let f = thermal_correction(
        z,
        300.0,
        BoundaryModel::IdealMetal,
        &au(),
        ThermalQuantity::SphereForce { radius: 150e-6 },
        &q(),
    )
    .unwrap();
    let (pp, fp) = (100.0 * p.relative.abs(), 100.0 * f.relative.abs());
    let ok = |x: f64| (x - 1.2).abs() <= 0.3;
    report(
        "A4",
        ok(pp) || ok(fp),
        format!(
            "ideal-metal thermal correction at 1 μm, 300 K: pressure {pp:.3}%, sphere–plate force {fp:.3}% (target 1.2 ± 0.3; \
             force is the quantity recorded for the open question)"
        ),
    );
}

#[test]
fn a05_ideal_versus_drude_force() {
    let (z, t, r) = (1e-6, 300.0, 150e-6);
    let hot = EvaluationPoint::new(z, t).unwrap();
    let cold = EvaluationPoint::new(z, 0.0).unwrap();
    let im = pfa_sphere_force(&hot, r, BoundaryModel::IdealMetal, &au(), &q())
        .unwrap()
        .value;
    let d = pfa_sphere_force(&hot, r, BoundaryModel::Drude, &au(), &q())
        .unwrap()
        .value;
    let d0 = pfa_sphere_force(&cold, r, BoundaryModel::Drude, &au(), &q())
        .unwrap()
        .value;
    let total = 100.0 * (im - d).abs() / im.abs();
    let thermal = 100.0 * (d - d0).abs() / im.abs();
    report(
        "A5",
        (total - 25.0).abs() <= 4.0 && (thermal - 19.0).abs() <= 4.0,
        format!("Drude vs ideal PFA force at 1 μm, 300 K: total {total:.2}% (25 ± 4), thermal part {thermal:.2} pp (19 ± 4)"),
    );
}

const LADDER_Z_NM: [f64; 5] = [260.0, 300.0, 400.0, 500.0, 600.0];
const LADDER_P_MPA: [f64; 5] = [240.5, 112.5, 36.0, 15.0, 7.5];
const LADDER_DP_MPA: [f64; 5] = [3.7, 1.5, 0.36, 0.12, 0.05];

fn ladder_pressures() -> Vec<f64> {
    let grid: Vec<f64> = LADDER_Z_NM.iter().map(|z| z / 1e9).collect();
    pressure_curve(&grid, 300.0, BoundaryModel::Drude, &au(), &q())
        .unwrap()
        .iter()
        .map(|p| p.value)
        .collect()
}

#[test]
fn a06_pressure_ladder() {
    let p = ladder_pressures();
    let mut parts = Vec::new();
    let mut pass = true;
    for i in 0..5 {
        let mpa = p[i].abs() * 1e3;
        let err = rel(mpa, LADDER_P_MPA[i]);
        pass &= err <= 0.10;
        parts.push(format!(
            "{}nm {mpa:.1}/{} ({:+.1}%)",
            LADDER_Z_NM[i],
            LADDER_P_MPA[i],
            100.0 * (mpa / LADDER_P_MPA[i] - 1.0)
        ));
    }
    report(
        "A6",
        pass,
        format!("|P| mPa computed/target (tol 10%): {}", parts.join(", ")),
    );
}

#[test]
fn a07_pressure_at_160_nm() {
    let pt = EvaluationPoint::nm(160.0, 300.0).unwrap();
    let p = pressure(&pt, BoundaryModel::Drude, &au(), &q()).unwrap().value.abs() * 1e3;
    report(
        "A7",
        (1070.0..=1180.0).contains(&p),
        format!("|P(160 nm, 300 K)| = {p:.1} mPa (window [1070, 1180])"),
    );
}

#[test]
fn a08_nernst_suite() {
    let z = 500e-9;
    let grid = DEFAULT_NERNST_GRID;
    let plasma = nernst_scan(z, BoundaryModel::Plasma, &au(), &grid, &q()).unwrap();
    let imp = nernst_scan(z, BoundaryModel::ImpedanceIr, &au(), &grid, &q()).unwrap();
    let impure = au().with_residual(0.004).unwrap();
    let residual = nernst_scan(z, BoundaryModel::Drude, &impure, &grid, &q()).unwrap();
    let perfect = nernst_scan(z, BoundaryModel::Drude, &au(), &grid, &q()).unwrap();
    let closed = perfect_drude_entropy_t0(z, &au(), &q()).unwrap();
    let perfect_err = rel(perfect.limit_estimate, closed);
    let pass = plasma.satisfied && imp.satisfied && residual.satisfied && !perfect.satisfied && perfect_err <= 0.05;
    report(
        "A8",
        pass,
        format!(
            "T grid {grid:?} K, θ_N = {:.3e}: plasma {} (S₀ {:.2e}), impedance {} (S₀ {:.2e}), \
             Drude ν_res=0.004 eV {} (S₀ {:.3e}, S(2 K) {:.3e}), perfect Drude violated={} (S₀ {:.5e} vs closed form {closed:.5e}, rel {perfect_err:.1e})",
            plasma.threshold,
            verdict(plasma.satisfied),
            plasma.limit_estimate,
            verdict(imp.satisfied),
            imp.limit_estimate,
            verdict(residual.satisfied),
            residual.limit_estimate,
            residual.trajectory.last().unwrap().1,
            !perfect.satisfied,
            perfect.limit_estimate,
        ),
    );
}

fn verdict(satisfied: bool) -> &'static str {
    if satisfied {
        "satisfied"
    } else {
        "violated"
    }
}

#[test]
fn a09_separation_error_ladder() {
    let exact = propagate_separation_error(-240.5e-3, 260e-9, 1e-9).unwrap() * 1e3;
    let p = ladder_pressures();
    let mut pass = (exact - 3.7).abs() < 5e-4;
    let mut parts = Vec::new();
    for i in 0..5 {
        let dp = propagate_separation_error(p[i], LADDER_Z_NM[i] / 1e9, 1e-9)
            .unwrap()
            .abs()
            * 1e3;
        let err = rel(dp, LADDER_DP_MPA[i]);
        pass &= err <= 0.10;
        parts.push(format!(
            "{}nm {dp:.3}/{} ({:+.1}%)",
            LADDER_Z_NM[i],
            LADDER_DP_MPA[i],
            100.0 * (dp / LADDER_DP_MPA[i] - 1.0)
        ));
    }
    report(
        "A9",
        pass,
        format!(
            "ΔP(240.5 mPa, 260 nm, 1 nm) = {exact:.4} mPa; ΔP from computed pressures (tol 10%): {}",
            parts.join(", ")
        ),
    );
}

fn excluded(theory: &dyn Theory, ds: &Dataset, lo: f64, hi: f64) -> bool {
    let series = theory_minus_experiment(ds, theory).unwrap();
    let band = confidence_band(&series, 0.95, DEFAULT_BIN_WIDTH).unwrap();
    exclusion_verdict(&band, lo, hi).unwrap().excluded
}

#[test]
fn a10_discrimination() {
    let grid: Vec<f64> = (230..=710).map(|n| n as f64 / 1e9).collect();
    let imp = CachedTheory::new(LifshitzTheory::plates(BoundaryModel::ImpedanceIr, au(), 300.0).unwrap());
    let drude = CachedTheory::new(LifshitzTheory::plates(BoundaryModel::Drude, au(), 300.0).unwrap());
    let noise = NoiseProfile::Ladder {
        scale: LADDER_NOISE_SCALE,
    };
    let (mut drude_out, mut imp_out, mut shifted_out) = (0, 0, 0);
    let trials = 100;
    for seed in 0..trials {
        let ds = synthesize_dataset(&imp, &grid, &noise, seed, "impedance synthetic").unwrap();
        drude_out += excluded(&drude, &ds, 300e-9, 500e-9) as u32;
        imp_out += excluded(&imp, &ds, 300e-9, 500e-9) as u32;
        let shifted = apply_separation_shift(&ds, -1e-9).unwrap();
        shifted_out += excluded(&drude, &shifted, 240e-9, 700e-9) as u32;
    }
    report(
        "A10",
        drude_out >= 90 && trials as u32 - imp_out >= 90 && shifted_out >= 90,
        format!(
            "{trials} trials, σ = ladder/1.96: Drude excluded over [300,500] nm in {drude_out}, impedance not excluded in {}, \
             Drude excluded over [240,700] nm after −1 nm shift in {shifted_out} (each ≥ 90)",
            trials as u32 - imp_out
        ),
    );
}

#[test]
fn a11_static_te_identity() {
    let mut worst: f64 = 0.0;
    for z in [100e-9, 250e-9, 500e-9, 1e-6, 3e-6] {
        let direct = perfect_drude_entropy_t0(z, &au(), &q()).unwrap();
        let via_reflection = static_te_entropy(z, BoundaryModel::Plasma, &au(), &q()).unwrap();
        worst = worst.max(rel(via_reflection, direct));
    }
    report(
        "A11",
        worst < 1e-8,
        format!("max rel difference over 5 separations = {worst:.2e} (tol 1e-8)"),
    );
}

#[test]
fn a12_curve_performance() {
    let grid: Vec<f64> = (0..100).map(|i| (160.0 + 540.0 * i as f64 / 99.0) / 1e9).collect();
    let start = Instant::now();
    let curve = pressure_curve(&grid, 300.0, BoundaryModel::Drude, &au(), &q()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "A12",
        curve.len() == 100 && elapsed < 10.0,
        format!("100-point Drude curve over [160, 700] nm at 300 K in {elapsed:.3} s (< 10 s)"),
    );
}
