use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

use super::dataset::{Dataset, Record};
use super::theory::Theory;

/// Default bin width for confidence bands, m.
pub const DEFAULT_BIN_WIDTH: f64 = 10e-9;

/// Minimum number of points in an emitted bin.
pub const MIN_BIN_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffRecord {
    pub z: f64,
    /// Theory minus experiment, SI units.
    pub diff: f64,
    /// √(σ_exp² + σ_num²).
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffSeries {
    pub records: Vec<DiffRecord>,
}

/// Evaluates the theory at every record's current separation, in parallel.
pub fn theory_minus_experiment(ds: &Dataset, theory: &dyn Theory) -> Result<DiffSeries> {
    if ds.kind() != theory.kind() {
        return Err(Error::invalid(
            "geometry",
            format!(
                "{:?} dataset cannot be compared with a {:?} theory",
                ds.kind(),
                theory.kind()
            ),
        ));
    }
    let records = ds
        .records()
        .par_iter()
        .map(|r| {
            let (value, err) = theory.evaluate(r.z)?;
            Ok(DiffRecord {
                z: r.z,
                diff: value - r.value,
                sigma: r.sigma.hypot(err),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiffSeries { records })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandBin {
    pub z_center: f64,
    pub half_width: f64,
    pub mean: f64,
    pub low: f64,
    pub high: f64,
    pub n_points: usize,
}

impl BandBin {
    pub fn contains_zero(&self) -> bool {
        self.low <= 0.0 && 0.0 <= self.high
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceBand {
    pub bins: Vec<BandBin>,
    pub level: f64,
}

fn bin_stats(points: &[f64], lo_edge: f64, hi_edge: f64, level: f64) -> Result<BandBin> {
    let n = points.len();
    let nf = n as f64;
    let mean = points.iter().sum::<f64>() / nf;
    let var = points.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0);
    let t = StudentsT::new(0.0, 1.0, nf - 1.0)
        .map_err(|e| Error::invalid("level", e.to_string()))?
        .inverse_cdf(0.5 * (1.0 + level));
    let half = t * (var / nf).sqrt();
    Ok(BandBin {
        z_center: 0.5 * (lo_edge + hi_edge),
        half_width: 0.5 * (hi_edge - lo_edge),
        mean,
        low: mean - half,
        high: mean + half,
        n_points: n,
    })
}

/// Bins the series on multiples of `bin_width` and reports a Student-t
/// interval for the mean difference in each bin. A bin with fewer than
/// three points absorbs its right neighbours until it has enough; a short
/// remainder at the end joins the last emitted bin.
pub fn confidence_band(series: &DiffSeries, level: f64, bin_width: f64) -> Result<ConfidenceBand> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("level", format!("must lie in (0, 1), got {level}")));
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::invalid(
            "bin_width",
            format!("must be positive, got {bin_width}"),
        ));
    }
    if series.records.len() < MIN_BIN_POINTS {
        return Err(Error::invalid(
            "series",
            format!("need at least {MIN_BIN_POINTS} points, got {}", series.records.len()),
        ));
    }
    let mut recs = series.records.clone();
    recs.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.diff.total_cmp(&b.diff)));
    // Tiny offset keeps grid points such as 300 nm / 10 nm in bin 30.
    let index = |z: f64| (z / bin_width + 1e-9).floor() as i64;

    // (first bin index, last bin index, diffs)
    let mut groups: Vec<(i64, i64, Vec<f64>)> = Vec::new();
    let mut pending: Option<(i64, i64, Vec<f64>)> = None;
    let mut i = 0;
    while i < recs.len() {
        let k = index(recs[i].z);
        let mut diffs = Vec::new();
        while i < recs.len() && index(recs[i].z) == k {
            diffs.push(recs[i].diff);
            i += 1;
        }
        let group = match pending.take() {
            Some((first, _, mut acc)) => {
                acc.extend(diffs);
                (first, k, acc)
            }
            None => (k, k, diffs),
        };
        if group.2.len() >= MIN_BIN_POINTS {
            groups.push(group);
        } else {
            pending = Some(group);
        }
    }
    if let Some((_, last, rest)) = pending {
        let prev = groups.last_mut().expect("at least three points overall");
        prev.1 = last;
        prev.2.extend(rest);
    }
    let bins = groups
        .iter()
        .map(|(first, last, d)| bin_stats(d, *first as f64 * bin_width, (*last + 1) as f64 * bin_width, level))
        .collect::<Result<_>>()?;
    Ok(ConfidenceBand { bins, level })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionVerdict {
    pub excluded: bool,
    pub level: f64,
    pub z_lo: f64,
    pub z_hi: f64,
    /// Bins whose centres lie in [z_lo, z_hi].
    pub bins: Vec<BandBin>,
}

/// A theory is excluded over [z_lo, z_hi] when no bin centred in the range
/// has a band containing zero.
pub fn exclusion_verdict(band: &ConfidenceBand, z_lo: f64, z_hi: f64) -> Result<ExclusionVerdict> {
    if !(z_lo < z_hi) {
        return Err(Error::invalid(
            "range",
            format!("need z_lo < z_hi, got [{z_lo}, {z_hi}]"),
        ));
    }
    let bins: Vec<BandBin> = band
        .bins
        .iter()
        .filter(|b| b.z_center >= z_lo && b.z_center <= z_hi)
        .copied()
        .collect();
    if bins.len() < 2 {
        return Err(Error::invalid(
            "range",
            format!("[{z_lo:e}, {z_hi:e}] m overlaps {} bins, need at least 2", bins.len()),
        ));
    }
    Ok(ExclusionVerdict {
        excluded: bins.iter().all(|b| !b.contains_zero()),
        level: band.level,
        z_lo,
        z_hi,
        bins,
    })
}

/// ΔP ≈ −P·4Δz/z for a P ∝ z⁻⁴ law.
pub fn propagate_separation_error(p: f64, z: f64, dz: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::invalid("z", format!("must be positive, got {z}")));
    }
    Ok(-p * 4.0 * dz / z)
}

pub fn apply_separation_shift(ds: &Dataset, dz: f64) -> Result<Dataset> {
    if !dz.is_finite() {
        return Err(Error::invalid("dz", "must be finite"));
    }
    if dz == 0.0 {
        return Ok(ds.clone());
    }
    let mut records = Vec::with_capacity(ds.len());
    for r in ds.records() {
        let z = r.z + dz;
        if !(z > 0.0) {
            return Err(Error::invalid(
                "dz",
                format!("shift {dz:e} m makes separation {z:e} m non-positive"),
            ));
        }
        records.push(Record { z, ..*r });
    }
    ds.relabelled(records, format!("{} (z shifted by {:+} nm)", ds.label(), dz * 1e9))
}
