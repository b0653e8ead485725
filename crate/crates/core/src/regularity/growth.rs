use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::increment_lp_norm;
use super::path::PathSample;
use crate::error::{Error, Result};

/// Quantile levels reported per `(ℓ, δ)` cell.
pub const QUANTILES: [f64; 3] = [0.5, 0.9, 0.99];

/// Linear-interpolation sample quantile.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mann-Kendall statistic `Σ_{i<j} sign(v_j − v_i)`.
pub fn kendall_s(values: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            s += match values[j].partial_cmp(&values[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s
}

/// Null variance of [`kendall_s`] for `n` untied values.
pub fn kendall_variance(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (2.0 * n + 5.0) / 18.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCell {
    pub ell: f64,
    pub delta: f64,
    /// Quantiles of the normalized ratio at [`QUANTILES`].
    pub quantiles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentGrowthReport {
    pub alpha: f64,
    /// Exponent `e` in the normalization `δ^α ℓ^e`.
    pub ell_exponent: f64,
    pub cells: Vec<GrowthCell>,
    /// Kendall statistic of the 99th percentile over `ℓ`, summed over `δ`.
    pub kendall_s: i64,
    pub kendall_z: f64,
    /// Largest over smallest 99th percentile across all cells.
    pub spread: f64,
}

impl MomentGrowthReport {
    /// No increasing trend beyond `z` standard errors.
    pub fn no_increasing_trend(&self, z: f64) -> bool {
        self.kendall_z <= z
    }
}

/// Quantiles of `Y_{ℓ,δ} / (δ^α ℓ^e)` across paths for every `(ℓ, δ)`, plus a
/// pooled Kendall trend statistic over `ℓ`.
pub fn moment_growth_check(
    paths: &[PathSample],
    deltas: &[f64],
    ells: &[f64],
    alpha: f64,
    ell_exponent: f64,
) -> Result<MomentGrowthReport> {
    if paths.is_empty() || deltas.is_empty() || ells.len() < 2 {
        return Err(Error::InvalidArgument("need paths, lags and at least two moment orders".into()));
    }
    let mut cells = Vec::with_capacity(deltas.len() * ells.len());
    let mut s_total = 0i64;
    let mut var_total = 0.0;
    let mut q99 = Vec::new();
    for &delta in deltas {
        let mut top = Vec::with_capacity(ells.len());
        for &ell in ells {
            let scale = delta.powf(alpha) * ell.powf(ell_exponent);
            let mut ratios: Vec<f64> = paths
                .par_iter()
                .map(|p| increment_lp_norm(p, delta, ell).map(|y| y / scale))
                .collect::<Result<_>>()?;
            ratios.sort_by(f64::total_cmp);
            let quantiles: Vec<f64> = QUANTILES.iter().map(|&q| quantile(&ratios, q)).collect();
            top.push(quantiles[2]);
            cells.push(GrowthCell { ell, delta, quantiles });
        }
        s_total += kendall_s(&top);
        var_total += kendall_variance(top.len());
        q99.extend(top);
    }
    let max = q99.iter().copied().fold(f64::MIN, f64::max);
    let min = q99.iter().copied().fold(f64::MAX, f64::min);
    Ok(MomentGrowthReport {
        alpha,
        ell_exponent,
        cells,
        kendall_s: s_total,
        kendall_z: s_total as f64 / var_total.sqrt(),
        spread: if min > 0.0 { max / min } else if max > 0.0 { f64::INFINITY } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kendall_and_quantile() {
        assert_eq!(kendall_s(&[1.0, 2.0, 3.0, 4.0]), 6);
        assert_eq!(kendall_s(&[4.0, 3.0, 2.0, 1.0]), -6);
        assert_eq!(kendall_s(&[1.0, 1.0]), 0);
        assert!((kendall_variance(4) - 26.0 / 3.0).abs() < 1e-12);
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert!((quantile(&v, 0.99) - 4.96).abs() < 1e-12);
    }

    #[test]
    fn zero_path_gives_zero_ratios() {
        let paths = vec![PathSample::from_fn(1.0, 64, |_| 0.0).unwrap(); 3];
        let r = moment_growth_check(&paths, &[0.125, 0.25], &[2.0, 4.0, 6.0, 8.0], 0.5, 0.5).unwrap();
        assert!(r.cells.iter().all(|c| c.quantiles.iter().all(|q| *q == 0.0)));
        assert_eq!(r.kendall_s, 0);
        assert!(r.no_increasing_trend(0.0));
    }

    #[test]
    fn linear_path_ratio_falls_with_ell() {
        // Y_{ℓ,δ} = δ(1 − δ)^{1/ℓ} rises in ℓ but is beaten by ℓ^{1/2}
        let paths = vec![PathSample::from_fn(1.0, 64, |t| t).unwrap()];
        let r = moment_growth_check(&paths, &[0.25], &[2.0, 4.0, 6.0, 8.0], 1.0, 0.5).unwrap();
        assert_eq!(r.kendall_s, -6);
        let r = moment_growth_check(&paths, &[0.25], &[2.0, 4.0, 6.0, 8.0], 1.0, 0.0).unwrap();
        assert_eq!(r.kendall_s, 6);
    }
}
