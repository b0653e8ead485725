use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a path came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    /// Hash of the resolved kernel spec and grid, or a fixture label.
    pub source: String,
    pub seed: u64,
    pub stream: u64,
}

impl Provenance {
    /// 64-bit FNV-1a digest of `text`, as 16 hex digits.
    pub fn fingerprint(text: &str) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// Values of a process on the uniform grid `t_k = k T / M`, `k = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    horizon: f64,
    values: Vec<f64>,
    pub provenance: Provenance,
}

impl PathSample {
    pub fn new(horizon: f64, values: Vec<f64>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon {horizon} must be positive")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least two points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("path values must be finite".into()));
        }
        Ok(Self {
            horizon,
            values,
            provenance: Provenance::default(),
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// `f` sampled at `M + 1` grid points.
    pub fn from_fn(horizon: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dt = horizon / m as f64;
        Self::new(horizon, (0..=m).map(|k| f(k as f64 * dt)).collect())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of steps `M`.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps() as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let m = self.steps();
        (0..=m)
            .map(|k| if k == m { self.horizon } else { k as f64 * self.dt() })
            .collect()
    }

    /// Every `factor`-th point.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(Error::InvalidArgument(format!(
                "factor {factor} does not divide {} steps",
                self.steps()
            )));
        }
        Ok(Self {
            horizon: self.horizon,
            values: self.values.iter().step_by(factor).copied().collect(),
            provenance: self.provenance.clone(),
        })
    }

    /// Lag `δ ∈ (0, T)` as a whole number of steps.
    pub fn lag_steps(&self, delta: f64) -> Result<usize> {
        let k = (delta / self.dt()).round();
        if k < 1.0 || k >= self.steps() as f64 || (k * self.dt() - delta).abs() > 1e-9 * delta.abs() {
            return Err(Error::Domain(format!("lag {delta} is not a grid multiple in (0, T)")));
        }
        Ok(k as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_grid() {
        let p = PathSample::from_fn(2.0, 4, |t| t * t).unwrap();
        assert_eq!(p.values(), &[0.0, 0.25, 1.0, 2.25, 4.0]);
        assert_eq!(p.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(p.subsample(2).unwrap().values(), &[0.0, 1.0, 4.0]);
        assert!(p.subsample(3).is_err());
        assert_eq!(p.lag_steps(1.0).unwrap(), 2);
        assert!(p.lag_steps(0.3).is_err());
        assert!(p.lag_steps(0.0).is_err());
        assert!(PathSample::new(1.0, vec![0.0, f64::NAN]).is_err());
        assert!(PathSample::new(0.0, vec![0.0, 1.0]).is_err());
        assert_eq!(Provenance::fingerprint(""), "cbf29ce484222325");
        assert_eq!(Provenance::fingerprint("a"), "af63dc4c8601ec8c");
    }
}
