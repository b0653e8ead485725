use serde::{Deserialize, Serialize};

use super::kfunc::KFunction;
use super::pair::{filter_pair_integral, PowerKernel};
use crate::error::{Error, Result};

/// Fractionally filtered Hermite kernel
/// `A_t(x) = c ∫ k_t(u) Π_i (u − x_i)_+^{β2/2 − 1} du` on `[0, T]`.
///
/// Construction enforces `β2 ∈ (1 − 1/n, 1)` and
/// `α = β1 + (n/2)(β2 − 1) + 1 ∈ (0, 1)`. Unless given explicitly, the scale
/// `c` is fixed by `n! ‖A_1‖² = 1`, i.e. `E[G(1)²] = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct HermiteKernelSpec {
    n: usize,
    beta1: f64,
    beta2: f64,
    horizon: f64,
    normalization: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    n: usize,
    beta1: f64,
    beta2: f64,
    #[serde(rename = "T")]
    horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normalization: Option<f64>,
}

impl TryFrom<RawSpec> for HermiteKernelSpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        let spec = Self::new(r.n, r.beta1, r.beta2, r.horizon)?;
        match r.normalization {
            Some(c) => spec.with_normalization(c),
            None => Ok(spec),
        }
    }
}

impl From<HermiteKernelSpec> for RawSpec {
    fn from(s: HermiteKernelSpec) -> Self {
        RawSpec {
            n: s.n,
            beta1: s.beta1,
            beta2: s.beta2,
            horizon: s.horizon,
            normalization: Some(s.normalization),
        }
    }
}

impl HermiteKernelSpec {
    pub fn new(n: usize, beta1: f64, beta2: f64, horizon: f64) -> Result<Self> {
        let mut spec = Self::unnormalized(n, beta1, beta2, horizon)?;
        spec.normalization = spec.unit_normalization();
        Ok(spec)
    }

    fn unnormalized(n: usize, beta1: f64, beta2: f64, horizon: f64) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::InvalidSpec(format!("chaos order {n} outside 1..=8")));
        }
        if !(beta1.is_finite() && beta2.is_finite() && horizon.is_finite()) {
            return Err(Error::InvalidSpec("parameters must be finite".into()));
        }
        if horizon <= 0.0 {
            return Err(Error::InvalidSpec(format!("horizon {horizon} must be positive")));
        }
        let lo = 1.0 - 1.0 / n as f64;
        if !(beta2 > lo && beta2 < 1.0) {
            return Err(Error::InvalidSpec(format!("beta2 = {beta2} outside ({lo}, 1)")));
        }
        let alpha = beta1 + 0.5 * n as f64 * (beta2 - 1.0) + 1.0;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha = {alpha} outside (0, 1)")));
        }
        Ok(Self {
            n,
            beta1,
            beta2,
            horizon,
            normalization: 1.0,
        })
    }

    /// Fractional Brownian motion with Hurst index `alpha`: `n = 1`,
    /// `β2 = 1/2`, `β1 = α − 3/4`.
    pub fn fbm(alpha: f64, horizon: f64) -> Result<Self> {
        Self::new(1, alpha - 0.75, 0.5, horizon)
    }

    /// Hermite process of order `n`: `β1 = 0`, `β2 = 1 − 2(1 − α)/n`.
    /// Requires `α ∈ (1/2, 1)`.
    pub fn hermite(n: usize, alpha: f64, horizon: f64) -> Result<Self> {
        Self::new(n, 0.0, 1.0 - 2.0 * (1.0 - alpha) / n as f64, horizon)
    }

    /// Rosenblatt process, the `n = 2` Hermite process.
    pub fn rosenblatt(alpha: f64, horizon: f64) -> Result<Self> {
        Self::hermite(2, alpha, horizon)
    }

    pub fn with_normalization(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidSpec(format!("normalization {c} must be finite and nonnegative")));
        }
        self.normalization = c;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn alpha(&self) -> f64 {
        self.beta1 + 0.5 * self.n as f64 * (self.beta2 - 1.0) + 1.0
    }

    /// Exponent `β2/2 − 1` of the envelope `φ`.
    pub fn gamma(&self) -> f64 {
        0.5 * self.beta2 - 1.0
    }

    /// Exponent of `K(u)^n ∝ |u|^{n(β2 − 1)}`.
    pub fn diagonal_exponent(&self) -> f64 {
        self.n as f64 * (self.beta2 - 1.0)
    }

    /// Decay exponent `e` of the truncated tail: the part of `‖A_t‖²` beyond
    /// `x < −L` scales like `(L/T)^{−e}`.
    pub fn tail_exponent(&self) -> f64 {
        let e = 2.0 - 2.0 * self.alpha();
        if self.n == 1 {
            e
        } else {
            e.min(1.0 - self.beta2)
        }
    }

    pub fn k(&self, t: f64, u: f64) -> f64 {
        k_filter(self.beta1, t, u)
    }

    /// `∫_a^b k_t(u) du`, exact.
    pub fn k_integral(&self, t: f64, a: f64, b: f64) -> f64 {
        k_integral(self.beta1, t, a, b)
    }

    /// `∫∫ k_1(u) k_1(v) |u − v|^{n(β2 − 1)} du dv`.
    pub fn unit_filter_energy(&self) -> f64 {
        let p = self.diagonal_exponent();
        if self.beta1 == 0.0 {
            2.0 / ((p + 1.0) * (p + 2.0))
        } else {
            filter_pair_integral(self.beta1, 1.0, 1.0, 0.0, PowerKernel::Plain(p), false, 1e-9)
        }
    }

    /// `‖A_1‖²` without the scale `c`.
    pub fn unit_norm_sq(&self) -> f64 {
        let kc = KFunction::new(self.beta2).constant();
        kc.powi(self.n as i32) * self.unit_filter_energy()
    }

    fn unit_normalization(&self) -> f64 {
        let fact: f64 = (1..=self.n).map(|k| k as f64).product();
        1.0 / (fact * self.unit_norm_sq()).sqrt()
    }

    /// Points where `k_t` is singular or jumps.
    pub fn singular_points(&self, t: f64) -> [f64; 2] {
        [0.0, t]
    }
}

/// The filter `k_t^{β1}(u)`: `1_{(0,t]}(u)` for `β1 = 0`, otherwise
/// `((t − u)_+^{β1} − (−u)_+^{β1}) / β1`.
pub fn k_filter(beta1: f64, t: f64, u: f64) -> f64 {
    k_from_offsets(beta1, t - u, -u)
}

/// `k` in terms of `a = t − u` and `b = −u`.
pub(crate) fn k_from_offsets(beta1: f64, a: f64, b: f64) -> f64 {
    if beta1 == 0.0 {
        if b < 0.0 && a >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (pos_pow(a, beta1) - pos_pow(b, beta1)) / beta1
    }
}

fn pos_pow(x: f64, p: f64) -> f64 {
    if x > 0.0 {
        x.powf(p)
    } else {
        0.0
    }
}

/// `∫_a^b k_t^{β1}(u) du`.
pub fn k_integral(beta1: f64, t: f64, a: f64, b: f64) -> f64 {
    if beta1 == 0.0 {
        return (b.min(t) - a.max(0.0)).max(0.0);
    }
    let q = beta1 + 1.0;
    let prim = |x: f64| {
        if x >= t {
            0.0
        } else if x >= 0.0 {
            (t - x).powf(q) / q
        } else {
            // (t − x)^q − (−x)^q without cancellation for x ≪ −t
            (-x).powf(q) * (q * (t / -x).ln_1p()).exp_m1() / q
        }
    };
    (prim(a) - prim(b)) / beta1
}
