use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};

use casimir_core::compare::{
    apply_separation_shift, confidence_band, exclusion_verdict, load_dataset, nm, synthesize_dataset,
    theory_minus_experiment, write_dataset, CachedTheory, ConfidenceBand, Dataset, DatasetKind, ExclusionVerdict,
    LifshitzTheory, NoiseProfile, LADDER_NOISE_SCALE,
};
use casimir_core::lifshitz::{
    free_energy_per_area, pressure, zero_temperature_energy_with, zero_temperature_pressure_with, LifshitzResult,
    ResidualAtZero,
};
use casimir_core::materials::{load_permittivity_table, LowFrequencyExtension};
use casimir_core::numerics::EvConversion;
use casimir_core::thermo::{entropy, nernst_scan, DEFAULT_NERNST_GRID};
use casimir_core::{BoundaryModel, Error, EvaluationPoint, Geometry, MaterialSpec, QuadratureSpec};
use rayon::prelude::*;
use serde_json::json;

use crate::args::*;

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn flag_for(name: &str) -> &str {
    match name {
        "z" | "z_grid" => "--z",
        "T" | "temperature" => "--T",
        "T_grid" => "--T-grid",
        "R" => "--R",
        "rel_tol" => "--rel-tol",
        "max_subdivisions" => "--max-subdivisions",
        "level" => "--level",
        "bin_width" => "--bin-width",
        "range" => "--range-min/--range-max",
        "dz" => "--shift",
        "noise" => "--noise",
        "nu_residual" => "--nu-residual",
        "model" => "--model",
        "material" | "table" => "--table",
        "geometry" => "--R",
        other => other,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_non_convergence() { 1 } else { 2 };
        let message = match &e {
            Error::InvalidArgument {
                name: "nu_residual",
                reason,
            } if reason.contains("explicitly") => {
                format!("invalid value for --nu-residual: {reason} (pass --allow-residual-t0)")
            }
            Error::InvalidArgument { name, reason } => format!("invalid value for {}: {reason}", flag_for(name)),
            other => other.to_string(),
        };
        CliError { message, code }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            // downstream closed the pipe; nothing left to report
            return CliError {
                message: String::new(),
                code: 0,
            };
        }
        CliError::usage(format!("i/o: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// (z, value, numeric error, Matsubara terms used), SI units.
type Row = (f64, f64, f64, Option<u64>);

struct Setup {
    model: BoundaryModel,
    material: MaterialSpec,
    quad: QuadratureSpec,
    residual: ResidualAtZero,
}

fn setup(t: &TheoryArgs) -> CliResult<Setup> {
    let model: BoundaryModel = t.model.parse().map_err(|_| {
        CliError::usage(format!(
            "invalid value for --model: `{}` (expected drude, plasma, impedance-ir, ideal-metal, mim or tabulated)",
            t.model
        ))
    })?;
    let mut material = match MaterialSpec::builtin(&t.material) {
        Some(m) => m,
        None => {
            let file = File::open(&t.material).map_err(|e| {
                CliError::usage(format!(
                    "invalid value for --material: `{}` is neither a built-in alias (au-19a, au-7, cu-example) nor a readable file ({e})",
                    t.material
                ))
            })?;
            serde_json::from_reader(BufReader::new(file))
                .map_err(|e| CliError::usage(format!("invalid value for --material: {e}")))?
        }
    };
    if let Some(nu) = t.nu_residual {
        material = material.with_residual(nu).map_err(|e| match e {
            Error::InvalidArgument { reason, .. } => {
                CliError::usage(format!("invalid value for --nu-residual: {reason}"))
            }
            other => other.into(),
        })?;
    }
    if t.legacy_conversion {
        material = material.with_conversion(EvConversion::Legacy);
    }
    if let Some(path) = &t.table {
        if model != BoundaryModel::Tabulated {
            return Err(CliError::usage("--table requires --model tabulated"));
        }
        let file = File::open(path).map_err(|e| CliError::usage(format!("invalid value for --table: {e}")))?;
        let extension = if t.table_extension == "plasma" {
            LowFrequencyExtension::Plasma
        } else {
            LowFrequencyExtension::Drude
        };
        let table = load_permittivity_table(BufReader::new(file))?.with_extension(extension);
        material = material.with_table(table);
    }
    model
        .check_material(&material)
        .map_err(|_| CliError::usage("--model tabulated needs --table or a material file with a table"))?;
    let mut quad = QuadratureSpec::default();
    if let Some(r) = t.rel_tol {
        quad.rel_tol = r;
    }
    if let Some(m) = t.max_subdivisions {
        quad.max_subdivisions = m;
    }
    quad.validate()?;
    let residual = if t.allow_residual_t0 {
        ResidualAtZero::Allow
    } else {
        ResidualAtZero::Reject
    };
    Ok(Setup {
        model,
        material,
        quad,
        residual,
    })
}

/// Separations in metres from --z or the --z-min/--z-max/--z-steps grid.
fn separations(g: &GridArgs) -> CliResult<Vec<f64>> {
    let nm = match (g.z, g.z_min, g.z_max, g.z_steps) {
        (Some(z), ..) => vec![z],
        (None, Some(lo), Some(hi), Some(n)) => {
            if n < 2 {
                return Err(CliError::usage("invalid value for --z-steps: need at least 2 points"));
            }
            if !(lo < hi) {
                return Err(CliError::usage("invalid value for --z-min/--z-max: need z-min < z-max"));
            }
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
        _ => {
            return Err(CliError::usage(
                "missing separation: give --z or --z-min, --z-max and --z-steps",
            ))
        }
    };
    if let Some(bad) = nm.iter().find(|z| !(**z > 0.0) || !z.is_finite()) {
        return Err(CliError::usage(format!(
            "invalid value for --z: separation must be positive, got {bad} nm"
        )));
    }
    Ok(nm.into_iter().map(|z| z / 1e9).collect())
}

fn check_temperature(t: f64) -> CliResult<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(CliError::usage(format!(
            "invalid value for --T: must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

fn radius_m(r_um: f64) -> CliResult<f64> {
    if !(r_um > 0.0) || !r_um.is_finite() {
        return Err(CliError::usage(format!(
            "invalid value for --R: radius must be positive, got {r_um} μm"
        )));
    }
    Ok(r_um / 1e6)
}

struct Column {
    header: &'static str,
    error_header: &'static str,
    json_name: &'static str,
    json_unit: &'static str,
    /// SI value times this gives the table unit.
    table_scale: f64,
}

const PRESSURE: Column = Column {
    header: "pressure_mPa",
    error_header: "numeric_error_mPa",
    json_name: "pressure",
    json_unit: "Pa",
    table_scale: 1e3,
};
const ENERGY: Column = Column {
    header: "energy_nJ_per_m2",
    error_header: "numeric_error_nJ_per_m2",
    json_name: "free_energy",
    json_unit: "J/m^2",
    table_scale: 1e9,
};
const FORCE: Column = Column {
    header: "force_pN",
    error_header: "numeric_error_pN",
    json_name: "force",
    json_unit: "N",
    table_scale: 1e12,
};
const ENTROPY: Column = Column {
    header: "entropy_J_per_K_m2",
    error_header: "numeric_error_J_per_K_m2",
    json_name: "entropy",
    json_unit: "J/(K m^2)",
    table_scale: 1.0,
};

fn emit_points(
    out: &mut dyn Write,
    format: Format,
    column: &Column,
    s: &Setup,
    temperature: f64,
    rows: &[Row],
    extra: serde_json::Value,
) -> CliResult<()> {
    match format {
        Format::Csv => {
            let with_l = rows.iter().any(|r| r.3.is_some());
            write!(out, "z_nm,T_K,{},{}", column.header, column.error_header)?;
            writeln!(out, "{}", if with_l { ",l_max" } else { "" })?;
            for &(z, v, e, l) in rows {
                write!(
                    out,
                    "{},{},{},{}",
                    nm(z),
                    temperature,
                    v * column.table_scale,
                    e * column.table_scale
                )?;
                match l {
                    Some(l) if with_l => writeln!(out, ",{l}")?,
                    _ => writeln!(out)?,
                }
            }
        }
        Format::Json => {
            let points: Vec<_> = rows
                .iter()
                .map(|&(z, v, e, l)| {
                    let mut p = json!({ "z": z, "T": temperature, column.json_name: v, "numeric_error": e });
                    if let Some(l) = l {
                        p["l_max_used"] = json!(l);
                    }
                    p
                })
                .collect();
            let mut doc = json!({
                "model": s.model.name(),
                "material": s.material.name(),
                "quantity": column.json_name,
                "unit": column.json_unit,
                "points": points,
            });
            if let (Some(d), Some(x)) = (doc.as_object_mut(), extra.as_object()) {
                d.extend(x.clone());
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
        }
    }
    Ok(())
}

fn lifshitz_rows(zs: &[f64], eval: impl Fn(f64) -> casimir_core::Result<LifshitzResult> + Sync) -> CliResult<Vec<Row>> {
    zs.par_iter()
        .map(|&z| {
            eval(z)
                .map(|r| (z, r.value, r.numeric_error, Some(r.l_max_used)))
                .map_err(CliError::from)
        })
        .collect()
}

fn pressure_point(s: &Setup, z: f64, t: f64) -> casimir_core::Result<LifshitzResult> {
    let pt = EvaluationPoint::new(z, t)?;
    if t == 0.0 {
        zero_temperature_pressure_with(z, s.model, &s.material, &s.quad, s.residual)
    } else {
        pressure(&pt, s.model, &s.material, &s.quad)
    }
}

fn energy_point(s: &Setup, z: f64, t: f64) -> casimir_core::Result<LifshitzResult> {
    let pt = EvaluationPoint::new(z, t)?;
    if t == 0.0 {
        zero_temperature_energy_with(z, s.model, &s.material, &s.quad, s.residual)
    } else {
        free_energy_per_area(&pt, s.model, &s.material, &s.quad)
    }
}

fn point_command(a: &PointArgs, column: &Column, out: &mut dyn Write) -> CliResult<()> {
    let s = setup(&a.theory)?;
    let zs = separations(&a.grid)?;
    check_temperature(a.temperature)?;
    let t = a.temperature;
    let rows = match column.json_name {
        "pressure" => lifshitz_rows(&zs, |z| pressure_point(&s, z, t))?,
        _ => lifshitz_rows(&zs, |z| energy_point(&s, z, t))?,
    };
    emit_points(out, a.format, column, &s, t, &rows, json!({}))
}

fn force_command(a: &ForceArgs, out: &mut dyn Write) -> CliResult<()> {
    let p = &a.point;
    let s = setup(&p.theory)?;
    let zs = separations(&p.grid)?;
    check_temperature(p.temperature)?;
    let r = radius_m(a.radius)?;
    let t = p.temperature;
    let geometry = Geometry::SpherePlate { radius: r };
    let rows = lifshitz_rows(&zs, |z| {
        geometry.check(z)?;
        energy_point(&s, z, t)
    })?
    .into_iter()
    .map(|(z, v, e, l)| (z, 2.0 * PI * r * v, 2.0 * PI * r * e, l))
    .collect::<Vec<_>>();
    emit_points(out, p.format, &FORCE, &s, t, &rows, json!({ "R": r }))
}

fn entropy_command(a: &PointArgs, out: &mut dyn Write) -> CliResult<()> {
    let s = setup(&a.theory)?;
    let zs = separations(&a.grid)?;
    check_temperature(a.temperature)?;
    let rows = zs
        .par_iter()
        .map(|&z| {
            let r = entropy(z, a.temperature, s.model, &s.material, &s.quad)?;
            Ok((z, r.value, r.numeric_error, None))
        })
        .collect::<CliResult<Vec<_>>>()?;
    emit_points(out, a.format, &ENTROPY, &s, a.temperature, &rows, json!({}))
}

fn nernst_command(a: &NernstArgs, out: &mut dyn Write) -> CliResult<()> {
    let s = setup(&a.theory)?;
    if !(a.z > 0.0) || !a.z.is_finite() {
        return Err(CliError::usage(format!(
            "invalid value for --z: separation must be positive, got {} nm",
            a.z
        )));
    }
    let grid = a.t_grid.clone().unwrap_or_else(|| DEFAULT_NERNST_GRID.to_vec());
    let v = nernst_scan(a.z / 1e9, s.model, &s.material, &grid, &s.quad)?;
    match a.format {
        Format::Json => {
            let doc = json!({
                "model": v.model.name(),
                "material": s.material.name(),
                "z": v.z,
                "limit_estimate": v.limit_estimate,
                "threshold": v.threshold,
                "satisfied": v.satisfied,
                "unit": "J/(K m^2)",
                "trajectory": v.trajectory.iter().map(|&(t, e)| json!({ "T": t, "entropy": e })).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
        }
        Format::Csv => {
            writeln!(out, "T_K,entropy_J_per_K_m2")?;
            for (t, e) in &v.trajectory {
                writeln!(out, "{t},{e}")?;
            }
            writeln!(out, "0,{}", v.limit_estimate)?;
        }
    }
    Ok(())
}

struct Comparison {
    model: BoundaryModel,
    theory: CachedTheory<LifshitzTheory>,
    data: Dataset,
    bin_width: f64,
}

fn prepare_comparison(c: &ComparisonArgs) -> CliResult<Comparison> {
    let s = setup(&c.theory)?;
    check_temperature(c.temperature)?;
    let (kind, geometry) = match c.radius {
        Some(r) => (DatasetKind::Force, Geometry::SpherePlate { radius: radius_m(r)? }),
        None => (DatasetKind::Pressure, Geometry::PlatePlate),
    };
    if !(c.bin_width > 0.0) || !c.bin_width.is_finite() {
        return Err(CliError::usage(format!(
            "invalid value for --bin-width: must be positive, got {}",
            c.bin_width
        )));
    }
    let file = File::open(&c.data).map_err(|e| CliError::usage(format!("invalid value for --data: {e}")))?;
    let data = load_dataset(BufReader::new(file), kind, c.data.display().to_string())?;
    data.require_statistics().map_err(|e| match e {
        Error::InvalidArgument { reason, .. } => CliError::usage(format!("invalid value for --data: {reason}")),
        other => other.into(),
    })?;
    let theory = LifshitzTheory::new(s.model, s.material, geometry, c.temperature, s.quad)?;
    Ok(Comparison {
        model: s.model,
        theory: CachedTheory::new(theory),
        data,
        bin_width: c.bin_width / 1e9,
    })
}

fn range_of(c: &ComparisonArgs, data: &Dataset) -> (f64, f64) {
    let r = data.records();
    (
        c.range_min.map_or(r[0].z, |v| v / 1e9),
        c.range_max.map_or(r[r.len() - 1].z, |v| v / 1e9),
    )
}

fn analyse(
    cmp: &Comparison,
    data: &Dataset,
    c: &ComparisonArgs,
) -> CliResult<(Vec<casimir_core::compare::DiffRecord>, ConfidenceBand, ExclusionVerdict)> {
    let series = theory_minus_experiment(data, &cmp.theory)?;
    let band = confidence_band(&series, c.level, cmp.bin_width)?;
    let (lo, hi) = range_of(c, data);
    let verdict = exclusion_verdict(&band, lo, hi)?;
    Ok((series.records, band, verdict))
}

fn units(kind: DatasetKind) -> (&'static str, f64) {
    match kind {
        DatasetKind::Pressure => ("mPa", 1e3),
        DatasetKind::Force => ("pN", 1e12),
    }
}

fn verdict_json(model: BoundaryModel, v: &ExclusionVerdict) -> serde_json::Value {
    json!({
        "model": model.name(),
        "range_nm": [nm(v.z_lo), nm(v.z_hi)],
        "level": v.level,
        "excluded": v.excluded,
        "bins": v.bins.iter().map(|b| json!({
            "z_center": b.z_center,
            "half_width": b.half_width,
            "mean": b.mean,
            "low": b.low,
            "high": b.high,
            "n_points": b.n_points,
        })).collect::<Vec<_>>(),
    })
}

fn compare_command(a: &CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    let cmp = prepare_comparison(&a.common)?;
    let data = apply_separation_shift(&cmp.data, a.shift / 1e9)?;
    let (diffs, band, verdict) = analyse(&cmp, &data, &a.common)?;
    let (unit, scale) = units(data.kind());
    let write_diff = |w: &mut dyn Write| -> std::io::Result<()> {
        writeln!(w, "z_nm,diff_{unit},sigma_{unit}")?;
        for d in &diffs {
            writeln!(w, "{},{},{}", nm(d.z), d.diff * scale, d.sigma * scale)?;
        }
        Ok(())
    };
    if let Some(path) = &a.diff_out {
        let mut f = File::create(path).map_err(|e| CliError::usage(format!("invalid value for --diff-out: {e}")))?;
        write_diff(&mut f)?;
    }
    match (a.format, a.table_kind.as_str()) {
        (Format::Json, _) => {
            let mut doc = verdict_json(cmp.model, &verdict);
            doc["shift_nm"] = json!(a.shift);
            doc["data"] = json!(data.label());
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
        }
        (Format::Csv, "diff") => write_diff(out)?,
        (Format::Csv, _) => {
            writeln!(out, "z_nm,mean_{unit},lo_{unit},hi_{unit}")?;
            for b in &band.bins {
                writeln!(
                    out,
                    "{},{},{},{}",
                    nm(b.z_center),
                    b.mean * scale,
                    b.low * scale,
                    b.high * scale
                )?;
            }
        }
    }
    Ok(())
}

fn shift_scan_command(a: &ShiftScanArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.shifts.is_empty() {
        return Err(CliError::usage("invalid value for --shifts: empty list"));
    }
    let cmp = prepare_comparison(&a.common)?;
    let mut rows = Vec::new();
    for &shift in &a.shifts {
        let data = apply_separation_shift(&cmp.data, shift / 1e9).map_err(|e| match e {
            Error::InvalidArgument { reason, .. } => CliError::usage(format!("invalid value for --shifts: {reason}")),
            other => other.into(),
        })?;
        let (_, _, v) = analyse(&cmp, &data, &a.common)?;
        rows.push((shift, v));
    }
    match a.format {
        Format::Csv => {
            writeln!(out, "shift_nm,excluded,n_bins,n_bins_excluding_zero")?;
            for (shift, v) in &rows {
                let n_ex = v.bins.iter().filter(|b| !b.contains_zero()).count();
                writeln!(out, "{shift},{},{},{n_ex}", v.excluded, v.bins.len())?;
            }
        }
        Format::Json => {
            let docs: Vec<_> = rows
                .iter()
                .map(|(shift, v)| {
                    let mut d = verdict_json(cmp.model, v);
                    d["shift_nm"] = json!(shift);
                    d
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&docs).expect("serializable"))?;
        }
    }
    Ok(())
}

fn synth_command(a: &SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    let s = setup(&a.theory)?;
    let zs = separations(&a.grid)?;
    check_temperature(a.temperature)?;
    let (geometry, kind) = match a.radius {
        Some(r) => (Geometry::SpherePlate { radius: radius_m(r)? }, DatasetKind::Force),
        None => (Geometry::PlatePlate, DatasetKind::Pressure),
    };
    let noise = if a.noise == "ladder" {
        NoiseProfile::Ladder {
            scale: a.noise_scale.unwrap_or(LADDER_NOISE_SCALE),
        }
    } else {
        let sigma: f64 = a.noise.parse().map_err(|_| {
            CliError::usage(format!(
                "invalid value for --noise: expected `ladder` or a number, got `{}`",
                a.noise
            ))
        })?;
        NoiseProfile::Constant {
            sigma: sigma * kind.unit_to_si(),
        }
    };
    let theory = LifshitzTheory::new(s.model, s.material, geometry, a.temperature, s.quad)?;
    for &z in &zs {
        geometry.check(z)?;
        EvaluationPoint::new(z, a.temperature)?;
    }
    let label = format!("synthetic {} seed {}", s.model.name(), a.seed);
    let ds = synthesize_dataset(&theory, &zs, &noise, a.seed, label)?;
    match &a.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::usage(format!("invalid value for --out: {e}")))?;
            write_dataset(&ds, f)?;
        }
        None => write_dataset(&ds, out)?,
    }
    Ok(())
}

pub fn execute(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match &command {
        Command::Pressure(a) => point_command(a, &PRESSURE, out),
        Command::Energy(a) => point_command(a, &ENERGY, out),
        Command::Force(a) => force_command(a, out),
        Command::Entropy(a) => entropy_command(a, out),
        Command::Nernst(a) => nernst_command(a, out),
        Command::Compare(a) => compare_command(a, out),
        Command::ShiftScan(a) => shift_scan_command(a, out),
        Command::Synth(a) => synth_command(a, out),
    }
}
