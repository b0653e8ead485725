//! One-dimensional quadrature: Gauss-Legendre rules for smooth integrands and
//! tanh-sinh for integrands with integrable endpoint singularities.

use std::f64::consts::FRAC_PI_2;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(x, w)` pairs mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + r * x, r * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Tanh-sinh settings.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub tol: f64,
    pub max_level: u32,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_level: 8,
        }
    }
}

const T_MAX: f64 = 6.5;

impl TanhSinh {
    pub fn new(tol: f64, max_level: u32) -> Self {
        Self { tol, max_level }
    }

    /// `∫_a^b f`. `f` is never evaluated at the endpoints.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.integrate_with(|x, _, _| f(x), a, b)
    }

    /// `∫_a^b f` where `f(x, x − a, b − x)` receives both endpoint distances
    /// computed without cancellation, for integrands singular at an endpoint.
    pub fn integrate_with<F: FnMut(f64, f64, f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let (sign, a, b, flip) = if a > b { (-1.0, b, a, true) } else { (1.0, a, b, false) };
        let r = 0.5 * (b - a);
        let mut eval = |t: f64| -> f64 {
            let y = FRAC_PI_2 * t.sinh();
            let e = (-2.0 * y.abs()).exp();
            let near = r * 2.0 * e / (1.0 + e);
            if near == 0.0 {
                return 0.0;
            }
            let far = 2.0 * r - near;
            let (x, dl, dr) = if t < 0.0 { (a + near, near, far) } else { (b - near, far, near) };
            let cy = y.cosh();
            let w = r * FRAC_PI_2 * t.cosh() / (cy * cy);
            let v = if flip { f(x, dr, dl) } else { f(x, dl, dr) };
            if v.is_finite() {
                w * v
            } else {
                0.0
            }
        };
        let mut h = 1.0;
        let mut sum = eval(0.0);
        let mut k = 1.0;
        while k * h <= T_MAX {
            sum += eval(k * h) + eval(-k * h);
            k += 1.0;
        }
        let mut prev = sum * h;
        for level in 1..=self.max_level {
            h *= 0.5;
            let mut k = 1.0;
            while k * h <= T_MAX {
                sum += eval(k * h) + eval(-k * h);
                k += 2.0;
            }
            let cur = sum * h;
            if level >= 3 && (cur - prev).abs() <= self.tol * cur.abs().max(1e-300) {
                return sign * cur;
            }
            prev = cur;
        }
        sign * prev
    }

    /// `∫_a^∞ f`, for `f` decaying faster than `1/x`.
    pub fn integrate_to_inf<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64) -> f64 {
        self.integrate_with(|s, _, q| f(a + s / q) / (q * q), 0.0, 1.0)
    }

    /// `∫_{-∞}^b f`, for `f` decaying faster than `1/|x|`.
    pub fn integrate_from_neg_inf<F: FnMut(f64) -> f64>(&self, mut f: F, b: f64) -> f64 {
        self.integrate_to_inf(|x| f(-x), -b)
    }

    /// `∫_a^b f` split at the interior points of `breaks`. `a` may be `-∞`.
    pub fn integrate_split<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
        self.integrate_split_with(|x, _| f(x), a, b, breaks)
    }

    /// Like [`TanhSinh::integrate_split`], but `f(x, seg)` also receives the
    /// current segment, so offsets from a breakpoint can be taken from
    /// [`Segment::offset`] without cancellation.
    pub fn integrate_split_with<F: FnMut(f64, &Segment) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breaks: &[f64],
    ) -> f64 {
        let mut pts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|&p| p > a && p < b && p.is_finite())
            .collect();
        pts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
        pts.push(b);
        let mut total = 0.0;
        let mut lo = a;
        for &hi in &pts {
            total += if lo == f64::NEG_INFINITY {
                self.integrate_with(
                    |s, _, q| {
                        let d = s / q;
                        let seg = Segment { lo, hi, dl: f64::INFINITY, dr: d };
                        f(hi - d, &seg) / (q * q)
                    },
                    0.0,
                    1.0,
                )
            } else {
                self.integrate_with(|x, dl, dr| f(x, &Segment { lo, hi, dl, dr }), lo, hi)
            };
            lo = hi;
        }
        total
    }
}

/// Position of a node inside a segment of [`TanhSinh::integrate_split_with`].
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    /// `x − lo`
    pub dl: f64,
    /// `hi − x`
    pub dr: f64,
}

impl Segment {
    /// `x − c`, exact when `c` is an endpoint of the segment.
    pub fn offset(&self, x: f64, c: f64) -> f64 {
        if c == self.lo {
            self.dl
        } else if c == self.hi {
            -self.dr
        } else {
            x - c
        }
    }
}
