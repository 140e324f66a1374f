//! Shared fixtures for the criterion benchmarks.

use casimir_core::MaterialSpec;

/// Uniform separation grid in metres, `n` points over `[lo_nm, hi_nm]`.
pub fn separation_grid(lo_nm: f64, hi_nm: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo_nm + (hi_nm - lo_nm) * i as f64 / (n - 1).max(1) as f64) / 1e9)
        .collect()
}

pub fn gold() -> MaterialSpec {
    MaterialSpec::au_19a()
}
