use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::besov::dyadic_levels;
use super::norms::increment_lp_norm;
use super::path::PathSample;
use crate::error::{Error, Result};

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Power-law exponent of `y ∝ x^a` from positive samples.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    least_squares(&lx, &ly).ok_or_else(|| Error::Domain("power-law fit needs two distinct abscissae".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub p: f64,
    pub levels: Vec<u32>,
    pub slopes: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation across paths.
    pub sd: f64,
    /// 95% normal interval for the mean.
    pub ci: (f64, f64),
}

/// Default levels: all representable ones minus the two coarsest and the finest.
pub fn default_levels(path: &PathSample) -> Vec<u32> {
    let all: Vec<u32> = dyadic_levels(path).into_iter().map(|(j, _)| j).collect();
    if all.len() < 5 {
        return all;
    }
    all[2..all.len() - 1].to_vec()
}

/// Per-path slope of `log Y_{p,δ_j}` against `log δ_j`, where `Y` is averaged
/// over its domain, i.e. divided by `(T − δ)^{1/p}`.
pub fn theta_slope_fit(paths: &[PathSample], p: f64, levels: Option<RangeInclusive<u32>>) -> Result<SlopeFit> {
    let first = paths.first().ok_or_else(|| Error::InvalidArgument("no paths".into()))?;
    let available: Vec<(u32, f64)> = dyadic_levels(first);
    let wanted: Vec<u32> = match levels {
        Some(r) => r.collect(),
        None => default_levels(first),
    };
    let chosen: Vec<(u32, f64)> = wanted
        .iter()
        .map(|j| {
            available
                .iter()
                .find(|(k, _)| k == j)
                .copied()
                .ok_or_else(|| Error::Domain(format!("level {j} is not representable")))
        })
        .collect::<Result<_>>()?;
    if chosen.len() < 2 {
        return Err(Error::Domain("a slope fit needs at least two levels".into()));
    }
    let slopes: Vec<f64> = paths
        .par_iter()
        .map(|path| {
            let mut xs = Vec::with_capacity(chosen.len());
            let mut ys = Vec::with_capacity(chosen.len());
            for &(_, delta) in &chosen {
                let y = increment_lp_norm(path, delta, p)?;
                xs.push(delta);
                ys.push(y / (path.horizon() - delta).powf(1.0 / p));
            }
            fit_power_law(&xs, &ys).map(|(a, _)| a)
        })
        .collect::<Result<_>>()?;
    let n = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / n;
    let sd = if slopes.len() > 1 {
        (slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let half = 1.96 * sd / n.sqrt();
    Ok(SlopeFit {
        p,
        levels: chosen.iter().map(|(j, _)| *j).collect(),
        slopes,
        mean,
        sd,
        ci: (mean - half, mean + half),
    })
}
