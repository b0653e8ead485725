use serde::{Deserialize, Serialize};

use super::discrete::DiscretizedKernel;
use super::kfunc::KFunction;
use super::kroute::{ContractionRoute, LagPair};
use super::pair::{filter_pair_integral, PowerKernel};
use super::spec::HermiteKernelSpec;
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

/// Quadrature tolerance for the filter pair integrals.
pub const PAIR_TOL: f64 = 1e-8;

/// Options for [`f_functional`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FOptions {
    /// Cells per filter scale in the `K` route.
    pub resolution: usize,
    /// Gauss-Legendre nodes per sub-interval of the shift integral.
    pub nodes: usize,
    /// Geometric sub-intervals toward each end of a smooth piece.
    pub grading: usize,
}

impl Default for FOptions {
    fn default() -> Self {
        Self {
            resolution: 16,
            nodes: 8,
            grading: 4,
        }
    }
}

/// `C` from the contraction norms `v[j−1] = ‖A_{x,s} ⊗_j A_{y,t}‖²`.
pub fn c_from_norms(alpha: f64, s: f64, t: f64, v: &[f64]) -> f64 {
    let first = (s * t).powf(-2.0 * alpha) * v[0];
    let rest: f64 = v[1..].iter().map(|x| x.max(0.0).sqrt()).sum();
    first + (s * t).powf(-alpha) * rest
}

fn check_domain(horizon: f64, s: f64, t: f64, x: f64, y: f64) -> Result<()> {
    let tol = 1e-12 * horizon;
    if !(s > 0.0 && t > 0.0 && x >= 0.0 && y >= 0.0 && x + s <= horizon + tol && y + t <= horizon + tol) {
        return Err(Error::Domain(format!(
            "(s, t, x, y) = ({s}, {t}, {x}, {y}) outside x + s ≤ T, y + t ≤ T"
        )));
    }
    Ok(())
}

/// `C_{s,t}(x, y)` through the `K` reduction. For `n = 1` the sum over
/// `j ≥ 2` is empty.
pub fn c_functional(route: &ContractionRoute, s: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    check_domain(route.spec().horizon(), s, t, x, y)?;
    let pair = route.lag_pair(s, t)?;
    c_on_pair(route, &pair, x - y)
}

fn c_on_pair(route: &ContractionRoute, pair: &LagPair, shift: f64) -> Result<f64> {
    let n = route.spec().n();
    let (s, t) = pair.lags();
    let v = (1..=n)
        .map(|j| route.contraction_norm_sq(pair, j, shift))
        .collect::<Result<Vec<_>>>()?;
    Ok(c_from_norms(route.spec().alpha(), s, t, &v))
}

/// `C_{s,t}(x, y)` from dense discretized increments and tensor contractions;
/// all four arguments are grid step counts.
pub fn c_functional_dense(kernel: &DiscretizedKernel, s_steps: usize, t_steps: usize, x_step: usize, y_step: usize) -> Result<f64> {
    let a = kernel.dense_increment(x_step, s_steps)?;
    let b = kernel.dense_increment(y_step, t_steps)?;
    let n = kernel.spec().n();
    let v = (1..=n)
        .map(|j| a.contract(&b, j).map(|c| c.norm() * c.norm()))
        .collect::<Result<Vec<_>>>()?;
    let dt = kernel.grid().dt();
    Ok(c_from_norms(kernel.spec().alpha(), s_steps as f64 * dt, t_steps as f64 * dt, &v))
}

/// Sub-intervals of `[a, b]` refined geometrically toward both ends.
fn graded(a: f64, b: f64, levels: usize) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let mut left = vec![a];
    let mut right = vec![b];
    let mut d = 0.5 * (b - a);
    let mut cuts = Vec::new();
    for _ in 1..levels {
        d *= 0.25;
        cuts.push(d);
    }
    for &c in cuts.iter().rev() {
        left.push(a + c);
        right.push(b - c);
    }
    left.push(mid);
    right.reverse();
    left.extend(right);
    left.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `F(s, t) = ∫₀^{T−t} ∫₀^{T−s} C_{s,t}(x, y) dx dy`, written as a single
/// integral of `C` over `w = x − y` against the trapezoidal density of `w`.
pub fn f_functional(route: &ContractionRoute, s: f64, t: f64, opts: &FOptions) -> Result<f64> {
    let horizon = route.spec().horizon();
    if !(s > 0.0 && t > 0.0 && s < horizon && t < horizon) {
        return Err(Error::Domain(format!("lags ({s}, {t}) must lie in (0, T)")));
    }
    let pair = route.lag_pair(s, t)?;
    let (lo, hi) = (-(horizon - t), horizon - s);
    let density = |w: f64| ((horizon - s).min(w + horizon - t) - w.max(0.0)).max(0.0);
    let mut breaks = vec![lo, hi];
    for b in [-s, 0.0, t - s, t] {
        if b > lo && b < hi {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * horizon);
    let gl = GaussLegendre::new(opts.nodes);
    let mut total = 0.0;
    for piece in breaks.windows(2) {
        for (a, b) in graded(piece[0], piece[1], opts.grading) {
            for (w, wt) in gl.mapped(a, b) {
                total += wt * density(w) * c_on_pair(route, &pair, w)?;
            }
        }
    }
    Ok(total)
}

/// `Q(s, t) = ∫∫ |k_t(u)| |k_s(v)| |u − v|^{0, n(β2 − 1)} dv du`.
pub fn q_functional(spec: &HermiteKernelSpec, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("lags ({s}, {t}) must be positive")));
    }
    let p = spec.diagonal_exponent();
    Ok(filter_pair_integral(spec.beta1(), t, s, 0.0, PowerKernel::Truncated(p), true, PAIR_TOL))
}

/// `s^{−2α} ∫∫ |k_s(u)| |k_s(v)| |K(u − v)|^n du dv`, which stays bounded when
/// `‖A_{x,s}‖ ≲ s^α` follows from the filter and `K` decay.
pub fn g1_envelope_ratio(spec: &HermiteKernelSpec, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("lag {s} must be positive")));
    }
    let kc = KFunction::new(spec.beta2()).constant();
    let p = spec.diagonal_exponent();
    let v = filter_pair_integral(spec.beta1(), s, s, 0.0, PowerKernel::Plain(p), true, PAIR_TOL);
    Ok(kc.powi(spec.n() as i32) * v / s.powf(2.0 * spec.alpha()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::grid::GridSpec;

    #[test]
    fn graded_cover() {
        let g = graded(0.0, 1.0, 4);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0].0, 0.0);
        assert_eq!(g[7].1, 1.0);
        for w in g.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert!((g[0].1 - 0.5 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn c_symmetric_and_n1_form() {
        let spec = HermiteKernelSpec::fbm(0.6, 1.0).unwrap();
        let route = ContractionRoute::new(&spec, 8).unwrap();
        let (s, t, x, y) = (0.25, 0.125, 0.1, 0.5);
        let a = c_functional(&route, s, t, x, y).unwrap();
        let b = c_functional(&route, t, s, y, x).unwrap();
        assert!((a - b).abs() < 1e-10 * a, "{a} vs {b}");
        let pair = route.lag_pair(s, t).unwrap();
        let i = route.inner(&pair, x - y);
        let want = (s * t).powf(-1.2) * i * i;
        assert!((a - want).abs() < 1e-10 * want);
        assert!(c_functional(&route, 0.5, 0.5, 0.6, 0.0).is_err());
    }

    #[test]
    fn rosenblatt_c_symmetric() {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        let route = ContractionRoute::new(&spec, 8).unwrap();
        let a = c_functional(&route, 0.25, 0.5, 0.3, 0.1).unwrap();
        let b = c_functional(&route, 0.5, 0.25, 0.1, 0.3).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn dense_n1_matches_inner_products() {
        let spec = HermiteKernelSpec::fbm(0.5, 1.0).unwrap();
        let kernel = DiscretizedKernel::new(&spec, &GridSpec::new(16)).unwrap();
        let a = kernel.dense_increment(2, 4).unwrap();
        let b = kernel.dense_increment(8, 2).unwrap();
        let i = a.inner(&b).unwrap();
        let c = c_functional_dense(&kernel, 4, 2, 2, 8).unwrap();
        let want = (0.25f64 * 0.125).powf(-2.0 * 0.5) * i * i;
        assert!((c - want).abs() < 1e-12 * want.max(1e-300));
    }

    #[test]
    fn f_symmetric() {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        let route = ContractionRoute::new(&spec, 8).unwrap();
        let opts = FOptions { resolution: 8, ..FOptions::default() };
        let a = f_functional(&route, 0.25, 0.125, &opts).unwrap();
        let b = f_functional(&route, 0.125, 0.25, &opts).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-3 * a, "{a} vs {b}");
    }

    #[test]
    fn q_examples() {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        for s in [0.25, 0.0625] {
            let q = q_functional(&spec, s, s).unwrap();
            assert!((q / (s * s) - 1.0).abs() < 1e-6, "{}", q / (s * s));
        }
        let spec = HermiteKernelSpec::fbm(0.4, 1.0).unwrap();
        let a = q_functional(&spec, 0.3, 0.1).unwrap();
        let b = q_functional(&spec, 0.1, 0.3).unwrap();
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn envelope_ratio_is_scale_free() {
        for spec in [HermiteKernelSpec::fbm(0.3, 1.0).unwrap(), HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap()] {
            let r1 = g1_envelope_ratio(&spec, 1.0).unwrap();
            for s in [0.25, 1.0 / 64.0] {
                let r = g1_envelope_ratio(&spec, s).unwrap();
                assert!((r / r1 - 1.0).abs() < 1e-3, "{r} vs {r1}");
            }
        }
    }
}
