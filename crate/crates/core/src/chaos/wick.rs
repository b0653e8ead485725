use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::hermite::hermite_table;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;
use crate::tensor::SymTensor;

/// A realization of the isonormal process on `R^d`: `W(e_i) = values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSeed<T> {
    pub dim: usize,
    pub values: Vec<T>,
    pub generator: String,
    pub seed: u64,
    pub stream: u64,
}

impl<T: Scalar> GaussianSeed<T> {
    pub fn draw(dim: usize, seed: u64, stream: u64) -> Self {
        let mut r = rng::stream(seed, stream);
        let values = rng::gaussian_vec(&mut r, dim).into_iter().map(T::of).collect();
        Self {
            dim,
            values,
            generator: rng::GENERATOR.into(),
            seed,
            stream,
        }
    }

    /// A fixed point, tagged as not generated.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("seed values must be finite".into()));
        }
        Ok(Self {
            dim: values.len(),
            values,
            generator: "fixed".into(),
            seed: 0,
            stream: 0,
        })
    }
}

/// `W_n(A)` compressed to one coefficient per coordinate-multiplicity
/// vector, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct HermiteForm<T> {
    order: usize,
    dim: usize,
    terms: Vec<(Vec<u16>, T)>,
}

impl<T: Scalar> HermiteForm<T> {
    pub fn from_tensor(a: &SymTensor<T>) -> Self {
        let (n, d) = (a.order(), a.dim());
        let mut acc: BTreeMap<Vec<u16>, T> = BTreeMap::new();
        let mut idx = vec![0usize; n];
        for &x in a.entries() {
            if x != T::zero() {
                let mut m = vec![0u16; d];
                for &i in &idx {
                    m[i] += 1;
                }
                *acc.entry(m).or_insert(T::zero()) += x;
            }
            for slot in (0..n).rev() {
                idx[slot] += 1;
                if idx[slot] < d {
                    break;
                }
                idx[slot] = 0;
            }
        }
        Self {
            order: n,
            dim: d,
            terms: acc.into_iter().collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(multiplicities, coefficient)` pairs.
    pub fn terms(&self) -> &[(Vec<u16>, T)] {
        &self.terms
    }

    pub fn eval(&self, xi: &[T]) -> Result<T> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: xi.len(),
            });
        }
        let tables: Vec<Vec<T>> = xi.iter().map(|&x| hermite_table(self.order, x)).collect();
        Ok(self
            .terms
            .iter()
            .map(|&(ref m, c)| {
                m.iter()
                    .zip(&tables)
                    .fold(c, |acc, (&mc, tab)| acc * tab[mc as usize])
            })
            .sum())
    }
}

/// `W_n(A)(ξ) = Σ_i A_i Π_c He_{m_c(i)}(ξ_c)`. The value only depends on the
/// symmetrization of `A`.
pub fn wick_eval<T: Scalar>(a: &SymTensor<T>, xi: &GaussianSeed<T>) -> Result<T> {
    wick_eval_at(a, &xi.values)
}

pub fn wick_eval_at<T: Scalar>(a: &SymTensor<T>, xi: &[T]) -> Result<T> {
    HermiteForm::from_tensor(a).eval(xi)
}

/// `W_n(Σ_u w_u φ_u^{⊗n})(ξ) = Σ_u w_u ‖φ_u‖^n He_n(⟨φ_u, ξ⟩ / ‖φ_u‖)`.
/// Zero vectors contribute nothing.
pub fn wick_eval_rank_one_sum<T: Scalar>(
    weights: &[T],
    vectors: &[Vec<T>],
    n: usize,
    xi: &[T],
) -> Result<T> {
    if weights.len() != vectors.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} vectors",
            weights.len(),
            vectors.len()
        )));
    }
    let mut total = T::zero();
    for (&w, phi) in weights.iter().zip(vectors) {
        if phi.len() != xi.len() {
            return Err(Error::DimensionMismatch {
                left: xi.len(),
                right: phi.len(),
            });
        }
        let norm = phi.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let z: T = phi.iter().zip(xi).map(|(&p, &x)| p * x).sum();
        let he = *hermite_table(n, z / norm).last().expect("nonempty");
        total += w * norm.powi(n as i32) * he;
    }
    Ok(total)
}
