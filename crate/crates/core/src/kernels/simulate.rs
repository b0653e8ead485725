use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::discrete::DiscretizedKernel;
use super::grid::GridSpec;
use super::spec::HermiteKernelSpec;
use crate::chaos::hermite::hermite;
use crate::error::{Error, Result};
use crate::regularity::{PathSample, Provenance};
use crate::rng;

/// Path simulator for `G(t) = W_n(A_t)` on the grid of a
/// [`DiscretizedKernel`].
///
/// Per path, `z_q = ⟨φ_q, ξ⟩` for the uniform nodes is one FFT convolution per
/// sub-node offset, `h_q = ‖φ_q‖^n He_n(z_q / ‖φ_q‖)`, and the filter sum
/// `Σ_q w_q(t) h_q` is a running sum (`β1 = 0`) or a second convolution.
pub struct Simulator {
    kernel: DiscretizedKernel,
    source: String,
    fft_len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    profile_spectra: Vec<Vec<Complex64>>,
    filter_spectra: Vec<Vec<Complex64>>,
    /// `∫_{node} (−u)_+^{β1}` for uniform nodes.
    offsets0: Vec<f64>,
    /// `∫_{node} k_{t_k}` for far nodes, row per node.
    far_weights: Vec<Vec<f64>>,
}

impl Simulator {
    pub fn new(spec: &HermiteKernelSpec, grid: &GridSpec) -> Result<Self> {
        let kernel = DiscretizedKernel::new(spec, grid)?;
        let source = Provenance::fingerprint(
            &serde_json::to_string(&(spec, grid)).map_err(|e| Error::InvalidArgument(e.to_string()))?,
        );
        Ok(Self::from_kernel(kernel, source))
    }

    pub fn from_kernel(kernel: DiscretizedKernel, source: String) -> Self {
        let g = kernel.grid().clone();
        let spec = *kernel.spec();
        let nn = g.n_near;
        let fft_len = (2 * nn + 2).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(fft_len);
        let inv = planner.plan_fft_inverse(fft_len);
        let spectrum = |v: &[f64]| {
            let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            buf.resize(fft_len, Complex64::new(0.0, 0.0));
            fwd.process(&mut buf);
            buf
        };
        let profile_spectra = kernel.profiles().iter().map(|p| spectrum(p)).collect();
        let r = g.nodes;
        let (h, eta) = (g.h, g.h / r as f64);
        let b1 = spec.beta1();
        let mut filter_spectra = Vec::new();
        let mut offsets0 = Vec::new();
        if b1 != 0.0 {
            let q = b1 + 1.0;
            let pp = |x: f64| if x > 0.0 { x.powf(q) } else { 0.0 };
            for m in 0..r {
                let gm: Vec<f64> = (0..=nn)
                    .map(|d| {
                        let a = d as f64 * h - m as f64 * eta;
                        (pp(a) - pp(a - eta)) / q
                    })
                    .collect();
                filter_spectra.push(spectrum(&gm));
            }
            offsets0 = kernel.nodes()[kernel.first_near()..]
                .iter()
                .map(|nd| (pp(-nd.lo) - pp(-nd.hi)) / q)
                .collect();
        }
        let far_weights = kernel.nodes()[..kernel.first_near()]
            .iter()
            .map(|nd| (0..=g.m).map(|k| spec.k_integral(g.time(k), nd.lo, nd.hi)).collect())
            .collect();
        Self {
            kernel,
            source,
            fft_len,
            fwd,
            inv,
            profile_spectra,
            filter_spectra,
            offsets0,
            far_weights,
        }
    }

    pub fn kernel(&self) -> &DiscretizedKernel {
        &self.kernel
    }

    /// Fingerprint of the spec and grid, recorded in path provenance.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Length of the Gaussian vector consumed per path.
    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// `h_q` for every node.
    fn node_values(&self, xi: &[f64]) -> Vec<f64> {
        let k = &self.kernel;
        let g = k.grid();
        let nf = g.num_far();
        let n = k.spec().n();
        let r = g.nodes;
        let (xi_far, xi_near) = xi.split_at(nf);
        let mut z = vec![0.0; k.num_nodes()];
        let mut buf: Vec<Complex64> = xi_near.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(self.fft_len, Complex64::new(0.0, 0.0));
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        for (m, spec) in self.profile_spectra.iter().enumerate() {
            let mut prod: Vec<Complex64> = buf.iter().zip(spec).map(|(a, b)| a * b).collect();
            self.inv.process(&mut prod);
            for j in k.near_cell0()..g.n_near {
                z[k.first_near() + (j - k.near_cell0()) * r + m] = prod[j].re * scale;
            }
        }
        for (q, zq) in z.iter_mut().enumerate() {
            *zq += k.far_row(q).iter().zip(xi_far).map(|(a, b)| a * b).sum::<f64>();
        }
        z.iter()
            .zip(k.norms_sq())
            .map(|(&zq, &n2)| {
                if n2 == 0.0 {
                    0.0
                } else {
                    let nrm = n2.sqrt();
                    nrm.powi(n as i32) * hermite(n, zq / nrm)
                }
            })
            .collect()
    }

    /// `G(t_0), ..., G(t_M)` driven by the standard Gaussian vector `xi`.
    pub fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: xi.len(),
            });
        }
        let k = &self.kernel;
        let g = k.grid();
        let spec = k.spec();
        let c = spec.normalization();
        let r = g.nodes;
        let hv = self.node_values(xi);
        let first = k.first_near();
        let mut out = vec![0.0; g.m + 1];
        if spec.beta1() == 0.0 {
            let eta = g.h / r as f64;
            let mut acc = 0.0;
            for (step, slot) in out.iter_mut().enumerate().skip(1) {
                let cells = (step - 1) * g.refine..step * g.refine;
                for cell in cells {
                    let base = first + cell * r;
                    acc += hv[base..base + r].iter().sum::<f64>();
                }
                *slot = c * eta * acc;
            }
            return Ok(out);
        }
        let b1 = spec.beta1();
        let near = &hv[first..];
        let mut total = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for (m, fspec) in self.filter_spectra.iter().enumerate() {
            let mut buf: Vec<Complex64> = (0..g.n_near).map(|j| Complex64::new(near[j * r + m], 0.0)).collect();
            buf.resize(self.fft_len, Complex64::new(0.0, 0.0));
            self.fwd.process(&mut buf);
            for (t, (a, b)) in total.iter_mut().zip(buf.iter().zip(fspec)) {
                *t += a * b;
            }
        }
        self.inv.process(&mut total);
        let scale = 1.0 / self.fft_len as f64;
        let s0: f64 = self.offsets0.iter().zip(near).map(|(a, b)| a * b).sum();
        for (step, slot) in out.iter_mut().enumerate().skip(1) {
            let idx = step * g.refine + g.n_left;
            let near_part = (total[idx].re * scale - s0) / b1;
            let far_part: f64 = self.far_weights.iter().zip(&hv[..first]).map(|(w, h)| w[step] * h).sum();
            *slot = c * (near_part + far_part);
        }
        Ok(out)
    }

    /// One path on stream `stream` of `seed`.
    pub fn path(&self, seed: u64, stream: u64) -> Result<PathSample> {
        let mut rng = rng::stream(seed, stream);
        let xi = rng::gaussian_vec(&mut rng, self.dim());
        let values = self.values(&xi)?;
        Ok(PathSample::new(self.kernel.grid().horizon, values)?.with_provenance(Provenance {
            source: self.source.clone(),
            seed,
            stream,
        }))
    }

    /// `count` paths on streams `first_stream..first_stream + count`, in
    /// stream order.
    pub fn paths(&self, seed: u64, first_stream: u64, count: usize) -> Result<Vec<PathSample>> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.path(seed, first_stream + i))
            .collect()
    }

    /// `G(T)` only, for moment studies.
    pub fn terminal_values(&self, seed: u64, count: usize) -> Result<Vec<f64>> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng::stream(seed, i);
                let xi = rng::gaussian_vec(&mut rng, self.dim());
                self.values(&xi).map(|v| *v.last().expect("nonempty"))
            })
            .collect()
    }
}

/// Convenience wrapper: `count` paths of the kernel process.
pub fn simulate_paths(spec: &HermiteKernelSpec, grid: &GridSpec, seed: u64, count: usize) -> Result<Vec<PathSample>> {
    Simulator::new(spec, grid)?.paths(seed, 0, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::wick::wick_eval_rank_one_sum;
    use crate::rng::Estimate;

    fn check_against_rank_one(spec: HermiteKernelSpec, grid: GridSpec) {
        let sim = Simulator::new(&spec, &grid).unwrap();
        let mut r = rng::stream(5, 0);
        let xi = rng::gaussian_vec(&mut r, sim.dim());
        let fast = sim.values(&xi).unwrap();
        let k = sim.kernel();
        let rows: Vec<Vec<f64>> = (0..k.num_nodes()).map(|q| k.phi_row(q)).collect();
        for (step, &f) in fast.iter().enumerate() {
            let w = k.weights_at(step);
            let slow = wick_eval_rank_one_sum(&w, &rows, spec.n(), &xi).unwrap();
            assert!((f - slow).abs() < 1e-9 * (1.0 + slow.abs()), "{spec:?} step {step}: {f} vs {slow}");
        }
    }

    #[test]
    fn fast_path_matches_rank_one_sum() {
        check_against_rank_one(HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap(), GridSpec::new(8).refine(2).nodes(2));
        check_against_rank_one(HermiteKernelSpec::fbm(0.3, 1.0).unwrap(), GridSpec::new(8).refine(2).nodes(2));
        check_against_rank_one(HermiteKernelSpec::fbm(0.75, 2.0).unwrap(), GridSpec::new(6));
        check_against_rank_one(HermiteKernelSpec::new(2, -0.1, 0.8, 1.0).unwrap(), GridSpec::new(4).nodes(3));
        check_against_rank_one(HermiteKernelSpec::new(1, 0.1, 0.5, 1.0).unwrap(), GridSpec::new(5).refine(3));
    }

    #[test]
    fn starts_at_zero_and_is_reproducible() {
        let spec = HermiteKernelSpec::fbm(0.5, 1.0).unwrap();
        let sim = Simulator::new(&spec, &GridSpec::new(64)).unwrap();
        let a = sim.path(3, 1).unwrap();
        let b = sim.path(3, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values()[0], 0.0);
        assert_ne!(a.values(), sim.path(3, 2).unwrap().values());
        assert_eq!(a.provenance.source, sim.source());
    }

    #[test]
    fn unit_variance_at_one() {
        let spec = HermiteKernelSpec::fbm(0.5, 1.0).unwrap();
        let sim = Simulator::new(&spec, &GridSpec::new(128)).unwrap();
        let g1 = sim.terminal_values(11, 10_000).unwrap();
        let sq: Vec<f64> = g1.iter().map(|x| x * x).collect();
        let est = Estimate::from_values(&sq);
        assert!(est.within(1.0, 3.0), "{est:?}");
    }
}
