use serde::{Deserialize, Serialize};

use super::oracle::moment_oracle;
use super::wick::HermiteForm;
use crate::error::{Error, Result};
use crate::rng::{self, Estimate};
use crate::scalar::Scalar;
use crate::tensor::SymTensor;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `|E[W_n(A) W_n(B)] − n! ⟨Ã, B̃⟩|` with the left side from the oracle.
pub fn covariance_identity_residual<T: Scalar>(a: &SymTensor<T>, b: &SymTensor<T>) -> Result<T> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch {
            expected: a.order(),
            found: b.order(),
        });
    }
    let lhs = moment_oracle(&[a, b])?;
    let rhs = T::of(factorial(a.order())) * a.symmetrize().inner(&b.symmetrize())?;
    Ok((lhs - rhs).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypercontractivityReport {
    pub order: usize,
    pub q: f64,
    pub samples: usize,
    pub seed: u64,
    pub generator: String,
    /// Estimate of `E|Z|^q`.
    pub lhs: Estimate,
    /// Estimate of `E Z²`.
    pub second_moment: Estimate,
    /// Exact `E Z² = n! ‖Ã‖²`.
    pub second_moment_exact: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    pub pass: bool,
}

/// Monte-Carlo check of `E|Z|^q ≤ n^{q/2} (q−1)^{qn/2} (E Z²)^{q/2}` for
/// `Z = W_n(A)`.
pub fn hypercontractivity_check(
    a: &SymTensor<f64>,
    q: f64,
    samples: usize,
    seed: u64,
) -> Result<HypercontractivityReport> {
    if q <= 2.0 || !q.is_finite() {
        return Err(Error::Domain(format!("hypercontractivity needs q > 2, got {q}")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let n = a.order();
    let dim = a.dim();
    let form = HermiteForm::from_tensor(a);
    let z = rng::sample_values(seed, samples, |r| {
        form.eval(&rng::gaussian_vec(r, dim)).expect("matching dimension")
    });
    let absq: Vec<f64> = z.iter().map(|x| x.abs().powf(q)).collect();
    let sq: Vec<f64> = z.iter().map(|x| x * x).collect();
    let lhs = Estimate::from_values(&absq);
    let m2 = Estimate::from_values(&sq);
    let c = (n as f64).powf(q / 2.0) * (q - 1.0).powf(q * n as f64 / 2.0);
    let rhs = c * m2.mean.max(0.0).powf(q / 2.0);
    let rhs_se = c * (q / 2.0) * m2.mean.max(0.0).powf(q / 2.0 - 1.0) * m2.se;
    let sym = a.symmetrize();
    let exact = factorial(n) * sym.norm() * sym.norm();
    let tol = 3.0 * (lhs.se * lhs.se + rhs_se * rhs_se).sqrt();
    Ok(HypercontractivityReport {
        order: n,
        q,
        samples,
        seed,
        generator: rng::GENERATOR.into(),
        lhs,
        second_moment: m2,
        second_moment_exact: exact,
        rhs,
        rhs_se,
        pass: lhs.mean <= rhs + tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GebeleinReport {
    /// `|E ξ g(η)|`.
    pub lhs: f64,
    /// `|ρ| (E ξ²)^{1/2} (E g(η)²)^{1/2}`.
    pub rhs: f64,
    pub rho: f64,
    pub e_xi2: f64,
    pub e_g2: f64,
    /// `E g(η)` of the polynomial as supplied; it is subtracted before use.
    pub g_mean: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Exact check of `|E ξ g(η)| ≤ |ρ| (E ξ²)^{1/2} (E g(η)²)^{1/2}` for
/// `ξ = W_2(h_ξ)`, `η = W_2(h_η ⊗ h_η)` and polynomial `g` with coefficients
/// lowest degree first.
pub fn gebelein_positive_check(
    h_xi: &SymTensor<f64>,
    h_eta: &[f64],
    g: &[f64],
) -> Result<GebeleinReport> {
    if h_xi.order() != 2 {
        return Err(Error::OrderMismatch {
            expected: 2,
            found: h_xi.order(),
        });
    }
    if h_xi.dim() != h_eta.len() {
        return Err(Error::DimensionMismatch {
            left: h_xi.dim(),
            right: h_eta.len(),
        });
    }
    let norm_xi = h_xi.norm().powi(2);
    let norm_eta = h_eta.iter().map(|x| x * x).sum::<f64>().powi(2);
    for (what, v) in [("‖h_ξ‖²", norm_xi), ("‖h_η‖⁴", norm_eta)] {
        if (v - 0.5).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("{what} must be 1/2, got {v}")));
        }
    }
    let b = SymTensor::rank_one_power(h_eta, 2)?;
    // E[ξ^a η^p] for a ∈ {0, 1, 2}
    let mixed = |a: usize, p: usize| -> Result<f64> {
        let mut list: Vec<&SymTensor<f64>> = vec![h_xi; a];
        list.extend(std::iter::repeat_n(&b, p));
        moment_oracle(&list)
    };
    let deg = g.len().saturating_sub(1);
    let eta_moments: Vec<f64> = (0..=2 * deg).map(|p| mixed(0, p)).collect::<Result<_>>()?;
    let g_mean: f64 = g.iter().zip(&eta_moments).map(|(c, m)| c * m).sum();
    let mut gc = g.to_vec();
    if gc.is_empty() {
        gc.push(0.0);
    }
    gc[0] -= g_mean;
    let e_xig: f64 = gc
        .iter()
        .enumerate()
        .map(|(p, &c)| if c == 0.0 { Ok(0.0) } else { Ok(c * mixed(1, p)?) })
        .sum::<Result<f64>>()?;
    let mut e_g2 = 0.0;
    for (i, &ci) in gc.iter().enumerate() {
        for (j, &cj) in gc.iter().enumerate() {
            e_g2 += ci * cj * eta_moments[i + j];
        }
    }
    let e_xi2 = mixed(2, 0)?;
    let e_eta2 = mixed(0, 2)?;
    let rho = mixed(1, 1)? / (e_xi2 * e_eta2).sqrt();
    let lhs = e_xig.abs();
    let rhs = rho.abs() * e_xi2.sqrt() * e_g2.max(0.0).sqrt();
    let slack = rhs - lhs;
    Ok(GebeleinReport {
        lhs,
        rhs,
        rho,
        e_xi2,
        e_g2,
        g_mean,
        slack,
        pass: slack >= -1e-10,
    })
}

/// The second-chaos pair with zero correlation whose squares are correlated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub e_xi2: f64,
    pub e_eta2: f64,
    pub e_xi_eta: f64,
    /// `E[(ξ² − Eξ²)(η² − Eη²)]`.
    pub e_squares: f64,
}

/// `ξ = W_2(e_1 ⊗ e_1 / √2)`, `η = W_2(sym(e_1 ⊗ e_2))` evaluated with the
/// moment oracle.
pub fn counterexample() -> Result<Counterexample> {
    let e1 = [1.0, 0.0];
    let e2 = [0.0, 1.0];
    let xi = SymTensor::elementary(&[&e1, &e1])?.scaled(1.0 / 2f64.sqrt());
    let eta = SymTensor::elementary(&[&e1, &e2])?.symmetrize();
    let e_xi2 = moment_oracle(&[&xi, &xi])?;
    let e_eta2 = moment_oracle(&[&eta, &eta])?;
    let e_xi_eta = moment_oracle(&[&xi, &eta])?;
    let e_xxyy = moment_oracle(&[&xi, &xi, &eta, &eta])?;
    Ok(Counterexample {
        e_xi2,
        e_eta2,
        e_xi_eta,
        e_squares: e_xxyy - e_xi2 * e_eta2,
    })
}
