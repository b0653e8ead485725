use serde::{Deserialize, Serialize};

use super::norms::{increment_norm, IncrementNorm};
use super::path::PathSample;
use crate::error::{Error, Result};

/// One dyadic level of a seminorm sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelValue {
    pub j: u32,
    pub delta: f64,
    /// Norm of the lag-`δ_j` increments.
    pub norm: f64,
    /// `(T/δ_j)^s · norm`.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovReport {
    pub s: f64,
    pub norm: IncrementNorm,
    pub value: f64,
    pub levels: Vec<LevelValue>,
}

impl BesovReport {
    /// Level attaining the supremum.
    pub fn argmax(&self) -> Option<&LevelValue> {
        self.levels.iter().max_by(|a, b| a.weighted.total_cmp(&b.weighted))
    }

    /// Least-squares slope of `log₂ weighted` against `j`; positive means growth
    /// across levels.
    pub fn growth_slope(&self) -> f64 {
        let xs: Vec<f64> = self.levels.iter().map(|l| l.j as f64).collect();
        let ys: Vec<f64> = self.levels.iter().map(|l| l.weighted.max(f64::MIN_POSITIVE).log2()).collect();
        super::fit::least_squares(&xs, &ys).map(|(slope, _)| slope).unwrap_or(0.0)
    }
}

/// Levels `j ≥ 1` with `δ_j = T 2^{−j}` a positive grid multiple below `T`.
pub fn dyadic_levels(path: &PathSample) -> Vec<(u32, f64)> {
    let mut out = Vec::new();
    let mut j = 1u32;
    loop {
        let delta = path.horizon() * 0.5f64.powi(j as i32);
        if delta < path.dt() * (1.0 - 1e-9) {
            break;
        }
        if path.lag_steps(delta).is_ok() {
            out.push((j, delta));
        }
        j += 1;
    }
    out
}

/// `sup_j 2^{js} ‖G(· + δ_j) − G(·)‖` over the representable levels, in units
/// where `T = 1`.
pub fn dyadic_besov_seminorm(path: &PathSample, s: f64, norm: IncrementNorm) -> Result<BesovReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("smoothness {s} must lie in (0, 1)")));
    }
    let levels = dyadic_levels(path);
    if levels.is_empty() {
        return Err(Error::Domain("no dyadic lag is representable on this grid".into()));
    }
    let mut out = Vec::with_capacity(levels.len());
    for (j, delta) in levels {
        let v = increment_norm(path, delta, norm)?;
        out.push(LevelValue {
            j,
            delta,
            norm: v,
            weighted: 2f64.powf(j as f64 * s) * v,
        });
    }
    let value = out.iter().fold(0.0f64, |m, l| m.max(l.weighted));
    Ok(BesovReport {
        s,
        norm,
        value,
        levels: out,
    })
}
