use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::PathSample;
use crate::error::{Error, Result};

const CHUNK: usize = 64;

/// Modulus `r^α |log r|^e`.
pub fn modulus(r: f64, alpha: f64, log_exponent: f64) -> f64 {
    r.powf(alpha) * r.ln().abs().powf(log_exponent)
}

/// `sup |G(s) − G(t)| / (|s−t|^α |log|s−t||^e)` over grid pairs with
/// `0 < |s − t| < 1/2`.
pub fn modulus_holder_statistic(path: &PathSample, alpha: f64, log_exponent: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(log_exponent >= 0.0) {
        return Err(Error::InvalidArgument(format!("bad modulus exponents ({alpha}, {log_exponent})")));
    }
    let v = path.values();
    let dt = path.dt();
    let max_lag = (((0.5 / dt) * (1.0 - 1e-12)).ceil() as usize - 1).min(path.steps());
    if max_lag == 0 {
        return Err(Error::Domain("no grid lag below 1/2".into()));
    }
    let range = v.iter().copied().fold(f64::MIN, f64::max) - v.iter().copied().fold(f64::MAX, f64::min);
    if range == 0.0 {
        return Ok(0.0);
    }
    // a lag can beat the current best only if range / modulus exceeds it
    let mut lags: Vec<(usize, f64)> = (1..=max_lag)
        .map(|k| (k, modulus(k as f64 * dt, alpha, log_exponent)))
        .collect();
    lags.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut best = 0.0f64;
    for chunk in lags.chunks(CHUNK) {
        if range / chunk[0].1 <= best {
            break;
        }
        let local = chunk
            .par_iter()
            .map(|&(k, d)| v.windows(k + 1).map(|w| (w[k] - w[0]).abs()).fold(0.0f64, f64::max) / d)
            .reduce(|| 0.0, f64::max);
        best = best.max(local);
    }
    Ok(best)
}

/// The statistic with log exponent `n/2`.
pub fn modulus_holder_for_chaos(path: &PathSample, alpha: f64, n: usize) -> Result<f64> {
    modulus_holder_statistic(path, alpha, n as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub steps: Vec<usize>,
    /// Mean statistic across paths at each resolution.
    pub means: Vec<f64>,
    /// Largest over smallest mean.
    pub growth: f64,
}

impl RefinementStudy {
    pub fn stable(&self, factor: f64) -> bool {
        self.growth < factor
    }
}

/// Mean statistic over paths at the native resolution and at `levels − 1`
/// dyadic coarsenings.
pub fn modulus_refinement(paths: &[PathSample], alpha: f64, log_exponent: f64, levels: usize) -> Result<RefinementStudy> {
    if paths.is_empty() || levels == 0 {
        return Err(Error::InvalidArgument("need paths and at least one level".into()));
    }
    let mut steps = Vec::with_capacity(levels);
    let mut means = Vec::with_capacity(levels);
    for l in (0..levels).rev() {
        let factor = 1usize << l;
        let stats: Vec<f64> = paths
            .iter()
            .map(|p| modulus_holder_statistic(&p.subsample(factor)?, alpha, log_exponent))
            .collect::<Result<_>>()?;
        steps.push(paths[0].steps() / factor);
        means.push(stats.iter().sum::<f64>() / stats.len() as f64);
    }
    let max = means.iter().copied().fold(f64::MIN, f64::max);
    let min = means.iter().copied().fold(f64::MAX, f64::min);
    Ok(RefinementStudy {
        steps,
        means,
        growth: if min > 0.0 { max / min } else if max > 0.0 { f64::INFINITY } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(path: &PathSample, alpha: f64, e: f64) -> f64 {
        let v = path.values();
        let dt = path.dt();
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let r = (j - i) as f64 * dt;
                if r < 0.5 {
                    best = best.max((v[j] - v[i]).abs() / modulus(r, alpha, e));
                }
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let path = PathSample::from_fn(1.0, 300, |t| (17.0 * t).sin() + (3.0 * t * t).cos() * 0.3 + (t * 91.0).sin() * 0.05).unwrap();
        for (a, e) in [(0.5, 0.5), (0.7, 1.0), (1.0, 0.0), (0.3, 0.25)] {
            let fast = modulus_holder_statistic(&path, a, e).unwrap();
            let slow = brute(&path, a, e);
            assert!((fast - slow).abs() <= 1e-14 * slow, "{fast} vs {slow}");
        }
    }

    #[test]
    fn constant_path_is_zero() {
        let path = PathSample::from_fn(1.0, 64, |_| 1.5).unwrap();
        assert_eq!(modulus_holder_for_chaos(&path, 0.5, 1).unwrap(), 0.0);
        assert!(modulus_holder_statistic(&path, 0.0, 1.0).is_err());
    }

    #[test]
    fn refinement_of_smooth_path_is_stable() {
        let path = PathSample::from_fn(1.0, 1024, |t| t * t).unwrap();
        let study = modulus_refinement(&[path], 1.0, 0.0, 3).unwrap();
        assert_eq!(study.steps, vec![256, 512, 1024]);
        assert!(study.stable(1.1), "{:?}", study);
    }
}
