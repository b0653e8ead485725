use rayon::prelude::*;

use super::grid::{Grid, GridSpec};
use super::spec::HermiteKernelSpec;
use crate::error::{Error, Result};
use crate::tensor::SymTensor;

/// Largest dense tensor `build_kernel` will assemble.
pub const DENSE_CAP: usize = 4_000_000;

/// Largest node count for which the Gram matrix is materialized.
pub const GRAM_CAP: usize = 6_000;

/// A quadrature node of the `u` integral: the sub-cell `[lo, hi]` and its
/// midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UNode {
    pub lo: f64,
    pub hi: f64,
    pub u: f64,
}

/// `A_t ≈ Σ_q w_q(t) φ_q^{⊗n}` on the cell basis `e_i = 1_{cell i} / √|cell i|`.
///
/// `w_q(t) = c ∫_{node q} k_t` is exact and `(φ_q)_i = ∫_{cell i} φ(u_q − x) dx / √|cell i|`
/// is the analytic cell projection of the envelope, so no node ever touches
/// its singularity. Nodes and uniform cells share one offset pattern, which
/// makes the uniform block of every `φ_q` a shifted copy of one profile.
#[derive(Debug, Clone)]
pub struct DiscretizedKernel {
    spec: HermiteKernelSpec,
    grid: Grid,
    nodes: Vec<UNode>,
    first_near: usize,
    near_cell0: usize,
    profiles: Vec<Vec<f64>>,
    far_rows: Vec<f64>,
    norms_sq: Vec<f64>,
}

/// Builds the discretized kernel for every time point of the grid.
pub fn build_kernel(spec: &HermiteKernelSpec, grid: &GridSpec) -> Result<DiscretizedKernel> {
    DiscretizedKernel::new(spec, grid)
}

impl DiscretizedKernel {
    pub fn new(spec: &HermiteKernelSpec, gs: &GridSpec) -> Result<Self> {
        let grid = Grid::new(spec, gs)?;
        let r = grid.nodes;
        let g1 = spec.gamma() + 1.0;
        let nf = grid.num_far();
        let h = grid.h;
        let eta = h / r as f64;
        let x0 = grid.x0();

        let mut nodes = Vec::new();
        if spec.beta1() != 0.0 {
            for c in 0..nf {
                let (a, b) = grid.cell(c);
                let w = (b - a) / r as f64;
                for m in 0..r {
                    let lo = a + m as f64 * w;
                    nodes.push(UNode { lo, hi: lo + w, u: lo + 0.5 * w });
                }
            }
        }
        let first_near = nodes.len();
        let near_cell0 = if spec.beta1() == 0.0 { grid.n_left } else { 0 };
        for j in near_cell0..grid.n_near {
            for m in 0..r {
                let lo = x0 + j as f64 * h + m as f64 * eta;
                nodes.push(UNode { lo, hi: lo + eta, u: lo + 0.5 * eta });
            }
        }

        let inv = 1.0 / (g1 * h.sqrt());
        let profiles: Vec<Vec<f64>> = (0..r)
            .map(|m| {
                let off = (m as f64 + 0.5) * eta;
                (0..grid.n_near)
                    .map(|k| {
                        let hi = k as f64 * h + off;
                        let lo = hi - h;
                        (hi.powf(g1) - pos_pow(lo, g1)) * inv
                    })
                    .collect()
            })
            .collect();

        let far_cells: Vec<(f64, f64)> = (0..nf).map(|c| grid.cell(c)).collect();
        let far_rows: Vec<f64> = nodes
            .par_iter()
            .flat_map_iter(|node| {
                let u = node.u;
                far_cells.iter().map(move |&(a, b)| {
                    (pos_pow(u - a, g1) - pos_pow(u - b, g1)) / (g1 * (b - a).sqrt())
                })
            })
            .collect();

        let prefix: Vec<Vec<f64>> = profiles
            .iter()
            .map(|p| {
                let mut acc = 0.0;
                p.iter()
                    .map(|v| {
                        acc += v * v;
                        acc
                    })
                    .collect()
            })
            .collect();
        let norms_sq = (0..nodes.len())
            .map(|q| {
                let far: f64 = far_rows[q * nf..(q + 1) * nf].iter().map(|v| v * v).sum();
                if q >= first_near {
                    let (j, m) = ((q - first_near) / r + near_cell0, (q - first_near) % r);
                    far + prefix[m][j]
                } else {
                    far
                }
            })
            .collect();

        Ok(Self {
            spec: *spec,
            grid,
            nodes,
            first_near,
            near_cell0,
            profiles,
            far_rows,
            norms_sq,
        })
    }

    pub fn spec(&self) -> &HermiteKernelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nodes(&self) -> &[UNode] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Dimension of the discretized space.
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub(crate) fn first_near(&self) -> usize {
        self.first_near
    }

    pub(crate) fn near_cell0(&self) -> usize {
        self.near_cell0
    }

    pub(crate) fn profiles(&self) -> &[Vec<f64>] {
        &self.profiles
    }

    /// Far-cell block of `φ_q`.
    pub(crate) fn far_row(&self, q: usize) -> &[f64] {
        let nf = self.grid.num_far();
        &self.far_rows[q * nf..(q + 1) * nf]
    }

    /// `‖φ_q‖²` per node.
    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    /// `(cell index j, sub-node m)` of a node in the uniform block.
    pub(crate) fn near_position(&self, q: usize) -> Option<(usize, usize)> {
        let r = self.grid.nodes;
        (q >= self.first_near).then(|| ((q - self.first_near) / r + self.near_cell0, (q - self.first_near) % r))
    }

    /// Full vector `φ_q`.
    pub fn phi_row(&self, q: usize) -> Vec<f64> {
        let nf = self.grid.num_far();
        let mut row = vec![0.0; self.dim()];
        row[..nf].copy_from_slice(self.far_row(q));
        if let Some((j, m)) = self.near_position(q) {
            let p = &self.profiles[m];
            for i in 0..=j {
                row[nf + i] = p[j - i];
            }
        }
        row
    }

    /// `w_q(t)`, scale included.
    pub fn weights(&self, t: f64) -> Vec<f64> {
        let c = self.spec.normalization();
        self.nodes
            .iter()
            .map(|nd| c * self.spec.k_integral(t, nd.lo, nd.hi))
            .collect()
    }

    /// Weights at time index `k`.
    pub fn weights_at(&self, k: usize) -> Vec<f64> {
        self.weights(self.grid.time(k))
    }

    /// Weights of `A_{x,s} = A_{x+s} − A_x` for `x = x_step·dt`, `s = s_steps·dt`,
    /// using `k_{x+s} − k_x = k_s(· − x)`.
    pub fn increment_weights(&self, x_step: usize, s_steps: usize) -> Result<Vec<f64>> {
        if s_steps == 0 || x_step + s_steps > self.grid.m {
            return Err(Error::Domain(format!(
                "increment ({x_step}, {s_steps}) outside 0..={}",
                self.grid.m
            )));
        }
        let (x, s) = (self.grid.time(x_step), s_steps as f64 * self.grid.dt());
        let c = self.spec.normalization();
        Ok(self
            .nodes
            .iter()
            .map(|nd| c * self.spec.k_integral(s, nd.lo - x, nd.hi - x))
            .collect())
    }

    /// Rank-one form of `A_{t_k}`: weights and vectors of the nodes with a
    /// nonzero weight.
    pub fn rank_one(&self, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let w = self.weights_at(k);
        let mut ws = Vec::new();
        let mut vs = Vec::new();
        for (q, &x) in w.iter().enumerate() {
            if x != 0.0 {
                ws.push(x);
                vs.push(self.phi_row(q));
            }
        }
        (ws, vs)
    }

    /// Dense `Σ_q w_q φ_q^{⊗n}`.
    pub fn dense_from_weights(&self, w: &[f64]) -> Result<SymTensor<f64>> {
        let (n, d) = (self.spec.n(), self.dim());
        let len = d
            .checked_pow(n as u32)
            .filter(|&l| l <= DENSE_CAP)
            .ok_or(Error::CapExceeded {
                what: "dense kernel entries",
                value: d.saturating_pow(n as u32),
                cap: DENSE_CAP,
            })?;
        if w.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                left: self.nodes.len(),
                right: w.len(),
            });
        }
        let mut entries = vec![0.0; len];
        let mut buf = Vec::with_capacity(len);
        for (q, &wq) in w.iter().enumerate() {
            if wq == 0.0 {
                continue;
            }
            let phi = self.phi_row(q);
            buf.clear();
            buf.push(wq);
            for _ in 0..n {
                let prev = std::mem::take(&mut buf);
                buf.reserve(prev.len() * d);
                for &a in &prev {
                    buf.extend(phi.iter().map(|&b| a * b));
                }
            }
            for (e, b) in entries.iter_mut().zip(&buf) {
                *e += b;
            }
        }
        SymTensor::new(n, d, entries)
    }

    pub fn dense(&self, k: usize) -> Result<SymTensor<f64>> {
        self.dense_from_weights(&self.weights_at(k))
    }

    pub fn dense_increment(&self, x_step: usize, s_steps: usize) -> Result<SymTensor<f64>> {
        self.dense_from_weights(&self.increment_weights(x_step, s_steps)?)
    }

    /// `⟨φ_q, φ_q'⟩^n` for all node pairs.
    pub fn gram_power(&self) -> Result<GramPower> {
        let u = self.nodes.len();
        if u > GRAM_CAP {
            return Err(Error::CapExceeded {
                what: "Gram nodes",
                value: u,
                cap: GRAM_CAP,
            });
        }
        let rows: Vec<Vec<f64>> = (0..u).into_par_iter().map(|q| self.phi_row(q)).collect();
        let n = self.spec.n() as i32;
        let data: Vec<f64> = (0..u)
            .into_par_iter()
            .flat_map_iter(|a| {
                let rows = &rows;
                (0..u).map(move |b| {
                    let g: f64 = rows[a].iter().zip(&rows[b]).map(|(x, y)| x * y).sum();
                    g.powi(n)
                })
            })
            .collect();
        Ok(GramPower { size: u, data })
    }
}

fn pos_pow(x: f64, p: f64) -> f64 {
    if x > 0.0 {
        x.powf(p)
    } else {
        0.0
    }
}

/// The matrix `(⟨φ_q, φ_q'⟩^n)`; `wᵀ G w = ‖Σ_q w_q φ_q^{⊗n}‖²`.
#[derive(Debug, Clone)]
pub struct GramPower {
    size: usize,
    data: Vec<f64>,
}

impl GramPower {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.size + b]
    }

    pub fn quadratic(&self, w: &[f64], v: &[f64]) -> f64 {
        let nz: Vec<usize> = (0..self.size).filter(|&b| v[b] != 0.0).collect();
        (0..self.size)
            .filter(|&a| w[a] != 0.0)
            .map(|a| {
                let row = &self.data[a * self.size..(a + 1) * self.size];
                w[a] * nz.iter().map(|&b| row[b] * v[b]).sum::<f64>()
            })
            .sum()
    }

    pub fn norm_sq(&self, w: &[f64]) -> f64 {
        self.quadratic(w, w).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::wick::{wick_eval_at, wick_eval_rank_one_sum};
    use crate::quad::TanhSinh;

    fn fbm_kernel(alpha: f64, m: usize) -> DiscretizedKernel {
        build_kernel(&HermiteKernelSpec::fbm(alpha, 1.0).unwrap(), &GridSpec::new(m)).unwrap()
    }

    #[test]
    fn rows_are_cell_projections() {
        let k = build_kernel(&HermiteKernelSpec::fbm(0.4, 1.0).unwrap(), &GridSpec::new(8).nodes(2)).unwrap();
        let g = k.spec().gamma();
        let q = TanhSinh::default();
        for idx in [0, k.first_near() - 1, k.first_near(), k.num_nodes() - 1] {
            let node = k.nodes()[idx];
            let row = k.phi_row(idx);
            for i in (0..k.dim()).step_by(5) {
                let (a, b) = k.grid().cell(i);
                let hi = b.min(node.u);
                let want = if hi <= a {
                    0.0
                } else {
                    q.integrate_with(|_, _, dr| (dr + (node.u - hi)).powf(g), a, hi) / (b - a).sqrt()
                };
                assert!((row[i] - want).abs() < 1e-8 * (1.0 + want.abs()), "node {idx} cell {i}: {} vs {want}", row[i]);
            }
            let n2: f64 = row.iter().map(|v| v * v).sum();
            assert!((n2 - k.norms_sq()[idx]).abs() < 1e-12 * n2);
        }
    }

    #[test]
    fn self_similar_increment_norms() {
        // ‖A_{0,s}‖² / s^{2α} is flat in s
        let k = build_kernel(&HermiteKernelSpec::fbm(0.75, 1.0).unwrap(), &GridSpec::new(64).refine(2)).unwrap();
        let gp = k.gram_power().unwrap();
        let ratios: Vec<f64> = [16usize, 8, 4]
            .iter()
            .map(|&s| {
                let w = k.increment_weights(0, s).unwrap();
                gp.norm_sq(&w) / (s as f64 / 64.0).powf(1.5)
            })
            .collect();
        for r in &ratios {
            assert!((r / ratios[0] - 1.0).abs() < 0.02, "{ratios:?}");
        }
        // normalization: n! ‖A_1‖² ≈ 1 up to truncation and cell bias
        assert!((ratios[0] - 1.0).abs() < 0.03, "{ratios:?}");
    }

    #[test]
    fn translation_covariance() {
        let k = fbm_kernel(0.75, 32);
        let nf = k.grid().num_far();
        let a = k.dense_increment(4, 8).unwrap();
        let b = k.dense_increment(5, 8).unwrap();
        let (ea, eb) = (a.entries(), b.entries());
        let mut worst: f64 = 0.0;
        for i in nf..k.dim() - 1 {
            worst = worst.max((ea[i] - eb[i + 1]).abs());
        }
        let scale = ea.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-12 * scale, "{worst}");
    }

    #[test]
    fn dense_and_rank_one_forms_agree() {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        let k = build_kernel(&spec, &GridSpec::new(8).far(50.0)).unwrap();
        let dense = k.dense(5).unwrap();
        let (w, v) = k.rank_one(5);
        let xi: Vec<f64> = (0..k.dim()).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let a = wick_eval_at(&dense, &xi).unwrap();
        let b = wick_eval_rank_one_sum(&w, &v, 2, &xi).unwrap();
        assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
        let gp = k.gram_power().unwrap();
        let nrm = gp.norm_sq(&k.weights_at(5));
        assert!((nrm - dense.norm().powi(2)).abs() < 1e-10 * nrm);
    }

    #[test]
    fn caps() {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        let k = build_kernel(&spec, &GridSpec::new(8192)).unwrap();
        assert!(matches!(k.dense(1), Err(Error::CapExceeded { .. })));
        assert!(matches!(k.gram_power(), Err(Error::CapExceeded { .. })));
        assert!(k.increment_weights(8100, 100).is_err() && k.increment_weights(0, 0).is_err());
    }
}
