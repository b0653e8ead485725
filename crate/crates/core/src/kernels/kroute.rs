use super::grid::TAIL_TARGET;
use super::kfunc::KFunction;
use super::spec::HermiteKernelSpec;
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

/// Default cells per unit of filter scale.
pub const DEFAULT_RESOLUTION: usize = 32;
const FAR_RATIO: f64 = 1.25;
const SEPARATED: f64 = 8.0;

/// Contraction norms of kernel increments through the reduction to `K`:
/// `‖A_{x,s} ⊗_j A_{y,t}‖²` is a four-fold integral of filters against
/// `K^{n−j}(r₁ − r₃) K^{n−j}(r₂ − r₄) K^j(r₁ − r₂ + x − y) K^j(r₃ − r₄ + x − y)`.
///
/// Each filter variable lives on its own cells, scaled with its lag. Filter
/// weights are exact cell integrals and the powers of `|·|` are exact cell
/// averages.
#[derive(Debug, Clone)]
pub struct ContractionRoute {
    spec: HermiteKernelSpec,
    kc: f64,
    resolution: usize,
    gl: GaussLegendre,
}

/// Cells and weights of `k_s` together with the in-filter matrices.
#[derive(Debug, Clone)]
struct FilterCells {
    cells: Vec<(f64, f64)>,
    weights: Vec<f64>,
    /// `D P_j D` for `P_j` the cell averages of `|r − r'|^{(n−j)(β2−1)}`.
    inner: Vec<Vec<f64>>,
}

/// Precomputed cells for a lag pair, reusable across shifts.
#[derive(Debug, Clone)]
pub struct LagPair {
    s: f64,
    t: f64,
    a: FilterCells,
    b: FilterCells,
}

impl LagPair {
    pub fn lags(&self) -> (f64, f64) {
        (self.s, self.t)
    }
}

/// Mean of `|u − v + c|^p` over `u ∈ a`, `v ∈ b`.
fn pair_average(gl: &GaussLegendre, p: f64, a: (f64, f64), b: (f64, f64), c: f64) -> f64 {
    if p == 0.0 {
        return 1.0;
    }
    let (wa, wb) = (a.1 - a.0, b.1 - b.0);
    let lo = a.0 - b.1 + c;
    let hi = a.1 - b.0 + c;
    let dist = if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    };
    if dist <= SEPARATED * (wa + wb) {
        let f = |z: f64| z.abs().powf(p + 2.0) / ((p + 1.0) * (p + 2.0));
        let v = f(a.1 - b.0 + c) + f(a.0 - b.1 + c) - f(a.1 - b.1 + c) - f(a.0 - b.0 + c);
        return v / (wa * wb);
    }
    // density of z = u − v + c is a trapezoid
    let k1 = (a.0 - b.0).min(a.1 - b.1) + c;
    let k2 = (a.0 - b.0).max(a.1 - b.1) + c;
    let rho = |z: f64| ((a.1).min(z - c + b.1) - (a.0).max(z - c + b.0)).max(0.0);
    let mut sum = 0.0;
    for (x0, x1) in [(lo, k1), (k1, k2), (k2, hi)] {
        if x1 > x0 {
            sum += gl.integrate(|z| z.abs().powf(p) * rho(z), x0, x1);
        }
    }
    sum / (wa * wb)
}

impl ContractionRoute {
    pub fn new(spec: &HermiteKernelSpec, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!("resolution {resolution} must be at least 2")));
        }
        Ok(Self {
            spec: *spec,
            kc: KFunction::new(spec.beta2()).constant(),
            resolution,
            gl: GaussLegendre::new(12),
        })
    }

    pub fn spec(&self) -> &HermiteKernelSpec {
        &self.spec
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Cells carrying `k_s`: `res` uniform cells on `(0, s]`, and for `β1 ≠ 0`
    /// another `res` on `(−s, 0]` followed by geometric cells down to the
    /// truncation point.
    fn filter_cells(&self, s: f64) -> FilterCells {
        let res = self.resolution;
        let h = s / res as f64;
        let mut edges: Vec<f64> = (0..=res).map(|i| i as f64 * h).collect();
        if self.spec.beta1() != 0.0 {
            let l_far = s * TAIL_TARGET.powf(-1.0 / self.spec.tail_exponent());
            let mut left: Vec<f64> = (1..=res).map(|i| -(i as f64) * h).collect();
            let mut w = h;
            let mut x = -s;
            while x > -l_far {
                w *= FAR_RATIO;
                x = (x - w).max(-l_far);
                left.push(x);
            }
            left.reverse();
            left.extend(edges);
            edges = left;
        }
        let cells: Vec<(f64, f64)> = edges.windows(2).map(|e| (e[0], e[1])).collect();
        let weights: Vec<f64> = cells.iter().map(|&(a, b)| self.spec.k_integral(s, a, b)).collect();
        let n = self.spec.n();
        let mut inner = Vec::with_capacity(n);
        for j in 1..=n {
            let p = (n - j) as f64 * (self.spec.beta2() - 1.0);
            let m = cells.len();
            let mut mat = vec![0.0; m * m];
            for a in 0..m {
                for b in a..m {
                    let v = weights[a] * weights[b] * pair_average(&self.gl, p, cells[a], cells[b], 0.0);
                    mat[a * m + b] = v;
                    mat[b * m + a] = v;
                }
            }
            inner.push(mat);
        }
        FilterCells { cells, weights, inner }
    }

    pub fn lag_pair(&self, s: f64, t: f64) -> Result<LagPair> {
        if !(s > 0.0 && t > 0.0 && s.is_finite() && t.is_finite()) {
            return Err(Error::Domain(format!("lags ({s}, {t}) must be positive")));
        }
        Ok(LagPair {
            s,
            t,
            a: self.filter_cells(s),
            b: self.filter_cells(t),
        })
    }

    fn scale(&self) -> f64 {
        let c = self.spec.normalization();
        c.powi(4) * self.kc.powi(2 * self.spec.n() as i32)
    }

    fn cross(&self, pair: &LagPair, j: usize, shift: f64) -> Vec<f64> {
        let p = j as f64 * (self.spec.beta2() - 1.0);
        let (ca, cb) = (&pair.a.cells, &pair.b.cells);
        let mut m = vec![0.0; ca.len() * cb.len()];
        for (a, &cell_a) in ca.iter().enumerate() {
            for (b, &cell_b) in cb.iter().enumerate() {
                m[a * cb.len() + b] = pair_average(&self.gl, p, cell_a, cell_b, shift);
            }
        }
        m
    }

    /// `‖A_{x,s} ⊗_j A_{y,t}‖²` for `x − y = shift`, `1 ≤ j ≤ n`.
    pub fn contraction_norm_sq(&self, pair: &LagPair, j: usize, shift: f64) -> Result<f64> {
        let n = self.spec.n();
        if j == 0 || j > n {
            return Err(Error::ContractionOutOfRange { j, max: n });
        }
        let m = self.cross(pair, j, shift);
        let (na, nb) = (pair.a.cells.len(), pair.b.cells.len());
        let pa = &pair.a.inner[j - 1];
        let pb = &pair.b.inner[j - 1];
        // X = M · (D_b P D_b), then Σ_{a,a'} (D_a P D_a)[a,a'] (X Mᵀ)[a,a']
        let mut x = vec![0.0; na * nb];
        for a in 0..na {
            let row = &m[a * nb..(a + 1) * nb];
            let out = &mut x[a * nb..(a + 1) * nb];
            for (b, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                for (o, &w) in out.iter_mut().zip(&pb[b * nb..(b + 1) * nb]) {
                    *o += v * w;
                }
            }
        }
        let mut total = 0.0;
        for a in 0..na {
            let xa = &x[a * nb..(a + 1) * nb];
            for a2 in 0..na {
                let w = pa[a * na + a2];
                if w == 0.0 {
                    continue;
                }
                let ma2 = &m[a2 * nb..(a2 + 1) * nb];
                total += w * xa.iter().zip(ma2).map(|(p, q)| p * q).sum::<f64>();
            }
        }
        Ok(self.scale() * total)
    }

    /// `⟨A_{x,s}, A_{y,t}⟩` for `x − y = shift`.
    pub fn inner(&self, pair: &LagPair, shift: f64) -> f64 {
        let n = self.spec.n();
        let m = self.cross(pair, n, shift);
        let nb = pair.b.cells.len();
        let mut total = 0.0;
        for (a, wa) in pair.a.weights.iter().enumerate() {
            total += wa * m[a * nb..(a + 1) * nb].iter().zip(&pair.b.weights).map(|(p, q)| p * q).sum::<f64>();
        }
        self.spec.normalization().powi(2) * self.kc.powi(n as i32) * total
    }

    /// `‖A_{x,s}‖²`, the same for every `x`.
    pub fn increment_norm_sq(&self, s: f64) -> Result<f64> {
        let pair = self.lag_pair(s, s)?;
        Ok(self.inner(&pair, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::TanhSinh;

    #[test]
    fn pair_average_agrees_with_quadrature() {
        let gl = GaussLegendre::new(12);
        let q = TanhSinh::new(1e-12, 9);
        type Case = (f64, (f64, f64), (f64, f64), f64);
        let cases: [Case; 5] = [
            (-0.3, (0.0, 1.0), (0.0, 1.0), 0.0),
            (-0.6, (0.0, 0.5), (0.25, 2.0), 0.1),
            (-0.4, (0.0, 0.1), (5.0, 5.2), 0.0),
            (-0.3, (-40.0, -30.0), (0.0, 1.0), 0.3),
            (0.5, (0.0, 1.0), (2.0, 3.0), -1.5),
        ];
        for &(p, a, b, c) in &cases {
            // one-dimensional reduction over z = u − v + c
            let rho = |z: f64| (a.1.min(z - c + b.1) - a.0.max(z - c + b.0)).max(0.0);
            let (lo, hi) = (a.0 - b.1 + c, a.1 - b.0 + c);
            let mut breaks = vec![a.0 - b.0 + c, a.1 - b.1 + c];
            if lo < 0.0 && hi > 0.0 {
                breaks.push(0.0);
            }
            breaks.sort_by(f64::total_cmp);
            let want = q.integrate_split(|z| z.abs().powf(p) * rho(z), lo, hi, &breaks) / ((a.1 - a.0) * (b.1 - b.0));
            let got = pair_average(&gl, p, a, b, c);
            assert!((got - want).abs() < 1e-8 * want.abs(), "{p} {a:?} {b:?} {c}: {got} vs {want}");
        }
    }

    #[test]
    fn increment_norm_matches_self_similarity() {
        for spec in [
            HermiteKernelSpec::fbm(0.75, 1.0).unwrap(),
            HermiteKernelSpec::fbm(0.3, 1.0).unwrap(),
            HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap(),
        ] {
            let route = ContractionRoute::new(&spec, 16).unwrap();
            let fact: f64 = (1..=spec.n()).map(|k| k as f64).product();
            for s in [1.0, 0.25] {
                let v = fact * route.increment_norm_sq(s).unwrap() / s.powf(2.0 * spec.alpha());
                assert!((v - 1.0).abs() < 0.03, "α={} s={s}: {v}", spec.alpha());
            }
        }
    }

    #[test]
    fn n1_contraction_is_squared_inner() {
        let spec = HermiteKernelSpec::fbm(0.6, 1.0).unwrap();
        let route = ContractionRoute::new(&spec, 8).unwrap();
        let pair = route.lag_pair(0.25, 0.125).unwrap();
        for shift in [0.0, 0.3, -0.05] {
            let i = route.inner(&pair, shift);
            let c = route.contraction_norm_sq(&pair, 1, shift).unwrap();
            assert!((c - i * i).abs() < 1e-12 * (1.0 + c), "{c} vs {}", i * i);
        }
        assert!(route.contraction_norm_sq(&pair, 2, 0.0).is_err());
    }
}
