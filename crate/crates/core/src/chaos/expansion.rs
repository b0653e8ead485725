use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::wick::HermiteForm;
use crate::cancellation::cancel;
use crate::error::{Error, Result};
use crate::pairings::{enumerate_admissible, IntervalDecomposition};
use crate::scalar::Scalar;
use crate::tensor::SymTensor;

/// Default cap on the total order `N` of a product expansion.
pub const DEFAULT_EXPANSION_CAP: usize = 12;

/// Chaos decomposition of `Π_i W_{d_i}(A_i)`: `terms[N − 2k]` is the
/// symmetrized sum of `R^V(A_1, ..., A_ℓ)` over admissible `V` with `|V| = k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ChaosExpansion<T> {
    pub lengths: Vec<usize>,
    pub dim: usize,
    pub terms: BTreeMap<usize, SymTensor<T>>,
}

impl<T: Scalar> ChaosExpansion<T> {
    pub fn total_order(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn term(&self, degree: usize) -> Option<&SymTensor<T>> {
        self.terms.get(&degree)
    }

    /// Degree-0 coefficient, i.e. the expectation of the product.
    pub fn mean(&self) -> T {
        self.terms
            .get(&0)
            .and_then(|t| t.scalar_value())
            .unwrap_or(T::zero())
    }

    /// `Σ_m W_m(terms[m])(ξ)`.
    pub fn eval(&self, xi: &[T]) -> Result<T> {
        let mut s = T::zero();
        for t in self.terms.values() {
            s += HermiteForm::from_tensor(t).eval(xi)?;
        }
        Ok(s)
    }

    /// `E[(Σ_m W_m(terms[m]))^2] = Σ_m m! ‖terms[m]‖²`.
    pub fn second_moment(&self) -> T {
        self.terms
            .iter()
            .map(|(&m, t)| {
                let fact: f64 = (1..=m).map(|k| k as f64).product();
                T::of(fact) * t.norm() * t.norm()
            })
            .sum()
    }
}

/// Expands `Π_i W_{d_i}(A_i)` into its chaos components.
pub fn expand_product<T: Scalar>(tensors: &[&SymTensor<T>], cap: usize) -> Result<ChaosExpansion<T>> {
    if tensors.len() < 2 {
        return Err(Error::InvalidArgument("expansion needs at least two factors".into()));
    }
    let dim = tensors[0].dim();
    if let Some(t) = tensors.iter().find(|t| t.dim() != dim) {
        return Err(Error::DimensionMismatch { left: dim, right: t.dim() });
    }
    let lengths: Vec<usize> = tensors.iter().map(|t| t.order()).collect();
    let n: usize = lengths.iter().sum();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "expansion total order",
            value: n,
            cap,
        });
    }
    if lengths.contains(&0) {
        // scalar factors simply scale the product of the rest
        let scale = tensors
            .iter()
            .filter(|t| t.order() == 0)
            .map(|t| t.entries()[0])
            .fold(T::one(), |a, b| a * b);
        let rest: Vec<&SymTensor<T>> = tensors.iter().copied().filter(|t| t.order() > 0).collect();
        let mut e = match rest.len() {
            0 => single(SymTensor::scalar(T::one(), dim)),
            1 => single(rest[0].symmetrize()),
            _ => expand_product(&rest, cap)?,
        };
        for t in e.terms.values_mut() {
            *t = t.scaled(scale);
        }
        e.lengths = lengths;
        return Ok(e);
    }
    let decomp = IntervalDecomposition::new(lengths.clone())?;
    let mut terms = BTreeMap::new();
    for k in 0..=n / 2 {
        let sets = enumerate_admissible(&decomp, k)?;
        if sets.is_empty() {
            continue;
        }
        let mut acc = SymTensor::zeros(n - 2 * k, dim)?;
        for v in &sets {
            acc = acc.add(&cancel(v, tensors)?)?;
        }
        terms.insert(n - 2 * k, acc.symmetrize());
    }
    Ok(ChaosExpansion { lengths, dim, terms })
}

fn single<T: Scalar>(t: SymTensor<T>) -> ChaosExpansion<T> {
    let mut terms = BTreeMap::new();
    let dim = t.dim();
    let order = t.order();
    terms.insert(order, t);
    ChaosExpansion {
        lengths: vec![order],
        dim,
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::oracle::moment_oracle;
    use crate::chaos::wick::wick_eval_at;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type T = SymTensor<f64>;

    fn unit_sym(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> T {
        let len = dim.pow(order as u32);
        let t = T::new(order, dim, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect())
            .unwrap()
            .symmetrize();
        let n = t.norm();
        t.scaled(1.0 / n)
    }

    #[test]
    fn first_chaos_pair() {
        let h = T::from_vector(&[1.0, 2.0]).unwrap();
        let k = T::from_vector(&[-0.5, 3.0]).unwrap();
        let e = expand_product(&[&h, &k], DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(e.terms.len(), 2);
        let want2 = h.tensor_product(&k).unwrap().symmetrize();
        assert!(e.term(2).unwrap().max_abs_diff(&want2).unwrap() < 1e-15);
        assert_eq!(e.mean(), 5.5);
    }

    #[test]
    fn cube_of_gaussian() {
        let e1 = T::basis(1, 0);
        let e = expand_product(&[&e1, &e1, &e1], DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(e.terms.keys().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(e.term(3).unwrap().entries(), &[1.0]);
        assert_eq!(e.term(1).unwrap().entries(), &[3.0]);
    }

    #[test]
    fn pointwise_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<T> = (0..3).map(|_| unit_sym(&mut rng, 2, 3)).collect();
        let refs: Vec<&T> = a.iter().collect();
        let e = expand_product(&refs, DEFAULT_EXPANSION_CAP).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let xi: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let lhs: f64 = a.iter().map(|t| wick_eval_at(t, &xi).unwrap()).product();
            let rhs = e.eval(&xi).unwrap();
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn mean_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for orders in [vec![1, 1], vec![2, 2], vec![1, 2, 3], vec![2, 2, 2, 2], vec![3, 3, 2]] {
            let a: Vec<T> = orders.iter().map(|&n| unit_sym(&mut rng, n, 2)).collect();
            let refs: Vec<&T> = a.iter().collect();
            let e = expand_product(&refs, DEFAULT_EXPANSION_CAP).unwrap();
            let o = moment_oracle(&refs).unwrap();
            assert!((e.mean() - o).abs() <= 1e-9 * o.abs().max(1.0), "{orders:?}: {} vs {o}", e.mean());
        }
    }

    #[test]
    fn scalar_factors_scale() {
        let h = T::from_vector(&[1.0, 0.0]).unwrap();
        let c = T::scalar(2.0, 2);
        let e = expand_product(&[&h, &c, &h], DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(e.mean(), 2.0);
        assert_eq!(e.term(2).unwrap().get(&[0, 0]), 2.0);
    }

    #[test]
    fn errors() {
        let h = T::from_vector(&[1.0, 0.0]).unwrap();
        let g = T::from_vector(&[1.0, 0.0, 0.0]).unwrap();
        assert!(expand_product(&[&h], 12).is_err());
        assert!(matches!(expand_product(&[&h, &g], 12), Err(Error::DimensionMismatch { .. })));
        let big = T::zeros(7, 2).unwrap();
        assert!(matches!(expand_product(&[&big, &big], 12), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let h = T::from_vector(&[1.0, 2.0]).unwrap();
        let e = expand_product(&[&h, &h], 12).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: ChaosExpansion<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
