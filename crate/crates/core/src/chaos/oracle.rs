//! Moments of products of multiple integrals computed without the product
//! formula: each factor is expanded into ordinary monomials, the monomials
//! are multiplied out and every monomial is integrated with Isserlis'
//! theorem.

use std::collections::HashMap;

use super::hermite::hermite_coefficients;
use super::wick::HermiteForm;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::SymTensor;

/// Largest total degree the oracle accepts.
pub const ORACLE_MAX_DEGREE: usize = 16;
/// Largest dimension the oracle accepts.
pub const ORACLE_MAX_DIM: usize = 6;

/// Polynomial in `ξ_1, ..., ξ_d` keyed by exponent vectors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: HashMap<Vec<u16>, f64>,
}

impl Polynomial {
    pub fn constant(dim: usize, c: f64) -> Self {
        let mut terms = HashMap::new();
        terms.insert(vec![0; dim], c);
        Self { dim, terms }
    }

    /// Ordinary-monomial form of `W_n(A)`.
    pub fn from_wick<T: Scalar>(a: &SymTensor<T>) -> Self {
        let d = a.dim();
        let form = HermiteForm::from_tensor(a);
        let coeffs: Vec<Vec<f64>> = (0..=a.order()).map(hermite_coefficients).collect();
        let mut out = Polynomial { dim: d, terms: HashMap::new() };
        for (mult, c) in form.terms() {
            // Π_c He_{m_c}(x_c) expanded coordinate by coordinate
            let mut part = Polynomial::constant(d, c.as_f64());
            for (coord, &m) in mult.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let mut next = Polynomial { dim: d, terms: HashMap::new() };
                for (exp, &v) in &part.terms {
                    for (p, &h) in coeffs[m as usize].iter().enumerate() {
                        if h == 0.0 {
                            continue;
                        }
                        let mut e = exp.clone();
                        e[coord] += p as u16;
                        *next.terms.entry(e).or_insert(0.0) += v * h;
                    }
                }
                part = next;
            }
            out.add_assign(&part);
        }
        out
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for (e, &v) in &other.terms {
            *self.terms.entry(e.clone()).or_insert(0.0) += v;
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms: HashMap<Vec<u16>, f64> = HashMap::new();
        for (ea, &a) in &self.terms {
            for (eb, &b) in &other.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert(0.0) += a * b;
            }
        }
        Polynomial { dim: self.dim, terms }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product::<f64>())
            .sum()
    }

    /// `E[p(ξ)]` for a centred Gaussian vector with covariance `cov`.
    pub fn expectation(&self, cov: &[Vec<f64>]) -> f64 {
        let mut memo = HashMap::new();
        self.terms
            .iter()
            .map(|(e, &c)| c * isserlis(cov, e, &mut memo))
            .sum()
    }

    /// `E[p(ξ)]` for i.i.d. standard normal coordinates.
    pub fn standard_expectation(&self) -> f64 {
        self.expectation(&identity(self.dim))
    }
}

pub fn identity(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// `E[Π_c ξ_c^{m_c}]` by pairing the first remaining factor with each other
/// factor in turn.
pub fn isserlis(cov: &[Vec<f64>], mult: &[u16], memo: &mut HashMap<Vec<u16>, f64>) -> f64 {
    let total: u32 = mult.iter().map(|&m| m as u32).sum();
    if total == 0 {
        return 1.0;
    }
    if total % 2 == 1 {
        return 0.0;
    }
    if let Some(&v) = memo.get(mult) {
        return v;
    }
    let first = mult.iter().position(|&m| m > 0).expect("nonzero degree");
    let mut rest = mult.to_vec();
    rest[first] -= 1;
    let mut acc = 0.0;
    for c in 0..mult.len() {
        if rest[c] == 0 || cov[first][c] == 0.0 {
            continue;
        }
        let copies = rest[c] as f64;
        let mut next = rest.clone();
        next[c] -= 1;
        acc += copies * cov[first][c] * isserlis(cov, &next, memo);
    }
    memo.insert(mult.to_vec(), acc);
    acc
}

/// `E[Π_i W_{d_i}(A_i)]` under the standard Gaussian measure on `R^d`.
pub fn moment_oracle<T: Scalar>(tensors: &[&SymTensor<T>]) -> Result<T> {
    let Some(first) = tensors.first() else {
        return Ok(T::one());
    };
    let d = first.dim();
    if let Some(t) = tensors.iter().find(|t| t.dim() != d) {
        return Err(Error::DimensionMismatch { left: d, right: t.dim() });
    }
    let degree: usize = tensors.iter().map(|t| t.order()).sum();
    if degree > ORACLE_MAX_DEGREE {
        return Err(Error::CapExceeded {
            what: "oracle total degree",
            value: degree,
            cap: ORACLE_MAX_DEGREE,
        });
    }
    if d > ORACLE_MAX_DIM {
        return Err(Error::CapExceeded {
            what: "oracle dimension",
            value: d,
            cap: ORACLE_MAX_DIM,
        });
    }
    let mut prod = Polynomial::constant(d, 1.0);
    for t in tensors {
        prod = prod.mul(&Polynomial::from_wick(t));
    }
    Ok(T::of(prod.standard_expectation()))
}
