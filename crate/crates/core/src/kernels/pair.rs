use super::spec::k_from_offsets;
use crate::quad::{Segment, TanhSinh};

/// Translation-invariant weight `P(w)` in a filter pair integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerKernel {
    /// `|w|^p`, `p > −1`
    Plain(f64),
    /// `|w|^{0,p}`: `1` for `|w| < 1`, `|w|^p` otherwise
    Truncated(f64),
}

impl PowerKernel {
    pub fn eval(&self, w: f64) -> f64 {
        let a = w.abs();
        match *self {
            PowerKernel::Plain(p) => a.powf(p),
            PowerKernel::Truncated(p) => {
                if a < 1.0 {
                    1.0
                } else {
                    a.powf(p)
                }
            }
        }
    }

    /// Offsets from the singular point where `P` is not smooth.
    fn breaks(&self) -> &'static [f64] {
        match self {
            PowerKernel::Plain(_) => &[0.0],
            PowerKernel::Truncated(_) => &[-1.0, 1.0],
        }
    }
}

/// `∫∫ g_t(u) g_s(v) P(u − v + shift) dv du` with `g = k^{β1}` or `|k^{β1}|`,
/// by nested tanh-sinh quadrature split at every point where an integrand
/// factor is singular or kinked.
pub fn filter_pair_integral(
    beta1: f64,
    t: f64,
    s: f64,
    shift: f64,
    kernel: PowerKernel,
    absolute: bool,
    tol: f64,
) -> f64 {
    let inner_q = TanhSinh::new(tol * 1e-2, 9);
    let outer_q = TanhSinh::new(tol, 8);
    let lower = if beta1 == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    let g = |a: f64, b: f64| {
        let v = k_from_offsets(beta1, a, b);
        if absolute {
            v.abs()
        } else {
            v
        }
    };
    let inner = |u: f64| -> f64 {
        let c = u + shift;
        let mut breaks = vec![0.0, s];
        breaks.extend(kernel.breaks().iter().map(|d| c + d));
        inner_q.integrate_split_with(
            |v, seg: &Segment| {
                let w = -seg.offset(v, c);
                g(-seg.offset(v, s), -seg.offset(v, 0.0)) * kernel.eval(w)
            },
            lower,
            s,
            &breaks,
        )
    };
    let mut breaks = vec![0.0, t];
    for base in [-shift, s - shift] {
        breaks.push(base);
        breaks.extend(kernel.breaks().iter().map(|d| base - d));
    }
    outer_q.integrate_split_with(
        |u, seg: &Segment| {
            let gu = g(-seg.offset(u, t), -seg.offset(u, 0.0));
            if gu == 0.0 {
                0.0
            } else {
                gu * inner(u)
            }
        },
        lower,
        t,
        &breaks,
    )
}
