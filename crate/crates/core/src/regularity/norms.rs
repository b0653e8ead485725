use serde::{Deserialize, Serialize};

use super::path::PathSample;
use crate::error::{Error, Result};

/// Relative bisection tolerance on `λ`.
pub const BISECTION_TOL: f64 = 1e-12;
/// Bisection iteration cap.
pub const BISECTION_MAX_ITER: usize = 200;
/// Ratio of the geometric `p` grid in [`psup_norm`].
pub const P_GRID_RATIO: f64 = 1.25;

/// `Φ_β(x) = e^{x^β} − 1` on all of `[0, ∞)`; the threshold `τ_β` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrliczFunction {
    pub beta: f64,
}

impl OrliczFunction {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("Orlicz exponent {beta} must be positive")));
        }
        Ok(Self { beta })
    }

    /// `Φ_{2/n}`, the function matching the `n`-th chaos.
    pub fn for_chaos(n: usize) -> Self {
        Self { beta: 2.0 / n as f64 }
    }

    pub fn tau(&self) -> f64 {
        0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        x.abs().powf(self.beta).exp_m1()
    }
}

/// Norm applied to increment samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IncrementNorm {
    Lp { p: f64 },
    Orlicz { beta: f64 },
}

impl IncrementNorm {
    /// Norm of a function sampled on equal cells of a domain of measure
    /// `measure`.
    pub fn apply(&self, values: &[f64], measure: f64) -> Result<f64> {
        match *self {
            IncrementNorm::Lp { p } => lp_norm(values, measure, p),
            IncrementNorm::Orlicz { beta } => luxemburg_norm(values, measure, &OrliczFunction::new(beta)?),
        }
    }
}

fn check_measure(values: &[f64], measure: f64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    if !(measure.is_finite() && measure > 0.0) {
        return Err(Error::InvalidArgument(format!("measure {measure} must be positive")));
    }
    Ok(())
}

/// `(Σ |f_i|^p · m/N)^{1/p}`; `p = ∞` gives the maximum.
pub fn lp_norm(values: &[f64], measure: f64, p: f64) -> Result<f64> {
    check_measure(values, measure)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must be at least 1")));
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    let cell = measure / values.len() as f64;
    let s: f64 = values.iter().map(|v| (v.abs() / max).powf(p)).sum::<f64>() * cell;
    Ok(max * s.powf(1.0 / p))
}

/// Luxemburg norm `inf{λ > 0 : Σ Φ(|f_i|/λ) · m/N ≤ 1}` by bisection.
pub fn luxemburg_norm(values: &[f64], measure: f64, phi: &OrliczFunction) -> Result<f64> {
    check_measure(values, measure)?;
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    let cell = measure / values.len() as f64;
    let modular = |lam: f64| values.iter().map(|v| phi.eval(v / lam)).sum::<f64>() * cell;
    let inv = |y: f64| (1.0 + y).ln().powf(1.0 / phi.beta);
    // Φ(max/λ)·cell ≤ modular ≤ Φ(max/λ)·m brackets the root
    let mut hi = max / inv(1.0 / measure);
    let mut lo = max / inv(1.0 / cell);
    if modular(lo) <= 1.0 {
        return Ok(lo);
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_TOL * hi {
            break;
        }
    }
    Ok(hi)
}

/// The `p` grid `1, 1.25, 1.25², …` up to `max(1, ln N)`.
pub fn p_grid(samples: usize) -> Vec<f64> {
    let p_max = (samples as f64).ln().max(1.0);
    let mut out = vec![1.0];
    loop {
        let next = out.last().expect("nonempty") * P_GRID_RATIO;
        if next > p_max * (1.0 + 1e-12) {
            break;
        }
        out.push(next);
    }
    out
}

/// `sup_p p^{−1/β} ‖f‖_{L^p}` over [`p_grid`].
pub fn psup_norm(values: &[f64], measure: f64, beta: f64) -> Result<f64> {
    check_measure(values, measure)?;
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta {beta} must be positive")));
    }
    let mut best = 0.0f64;
    for p in p_grid(values.len()) {
        best = best.max(p.powf(-1.0 / beta) * lp_norm(values, measure, p)?);
    }
    Ok(best)
}

/// `G(· + δ) − G(·)` on the left grid points of `[0, T − δ]`.
pub fn increments(path: &PathSample, lag_steps: usize) -> Vec<f64> {
    let v = path.values();
    v.windows(lag_steps + 1).map(|w| w[lag_steps] - w[0]).collect()
}

/// `Y_{p,δ} = ‖G(· + δ) − G(·)‖_{L^p(0, T − δ)}` as a left Riemann sum.
pub fn increment_lp_norm(path: &PathSample, delta: f64, p: f64) -> Result<f64> {
    let k = path.lag_steps(delta)?;
    lp_norm(&increments(path, k), path.horizon() - k as f64 * path.dt(), p)
}

/// Any [`IncrementNorm`] of the lag-`δ` increments.
pub fn increment_norm(path: &PathSample, delta: f64, norm: IncrementNorm) -> Result<f64> {
    let k = path.lag_steps(delta)?;
    norm.apply(&increments(path, k), path.horizon() - k as f64 * path.dt())
}
