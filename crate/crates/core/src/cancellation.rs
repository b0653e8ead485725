//! The cancellation operator `R^V` and executable forms of its algebraic
//! properties.

use crate::error::{Error, Result};
use crate::pairings::PairSet;
use crate::scalar::Scalar;
use crate::tensor::{Permutation, SymTensor};

fn check_inputs<T: Scalar>(v: &PairSet, tensors: &[&SymTensor<T>]) -> Result<usize> {
    let lengths = v.decomposition().lengths();
    if tensors.len() != lengths.len() {
        return Err(Error::InvalidArgument(format!(
            "{} tensors for {} intervals",
            tensors.len(),
            lengths.len()
        )));
    }
    let dim = tensors[0].dim();
    for (t, &d) in tensors.iter().zip(lengths) {
        if t.order() != d {
            return Err(Error::OrderMismatch {
                expected: d,
                found: t.order(),
            });
        }
        if t.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: t.dim(),
            });
        }
    }
    Ok(dim)
}

/// `R^V(A_1, ..., A_ℓ)`.
///
/// Survivor slots become the free indices of the result in increasing order;
/// each pair contributes one summation index shared by its two endpoints.
pub fn cancel<T: Scalar>(v: &PairSet, tensors: &[&SymTensor<T>]) -> Result<SymTensor<T>> {
    let d = check_inputs(v, tensors)?;
    let decomp = v.decomposition();
    let n_total = decomp.total();
    let survivors = v.v_star();
    let r = survivors.len();
    let k = v.len();
    let nvars = r + k;

    // variable feeding each global slot
    let mut var_of = vec![0usize; n_total + 1];
    for (pos, &g) in survivors.iter().enumerate() {
        var_of[g] = pos;
    }
    for (t, &(m, n)) in v.pairs().iter().enumerate() {
        var_of[m] = r + t;
        var_of[n] = r + t;
    }

    // per tensor: stride contributed by each variable
    let strides: Vec<Vec<usize>> = (0..tensors.len())
        .map(|j| {
            let len = decomp.lengths()[j];
            let s = decomp.offsets()[j];
            let mut st = vec![0usize; nvars];
            for i in 1..=len {
                st[var_of[s + i]] += d.pow((len - i) as u32);
            }
            st
        })
        .collect();

    let mut entries = SymTensor::<T>::zeros(r, d)?.into_entries();
    let inner_len = d.pow(k as u32);
    let mut idx = vec![0usize; nvars];
    let mut offs = vec![0usize; tensors.len()];
    for slot in entries.iter_mut() {
        let mut acc = T::zero();
        for _ in 0..inner_len {
            let mut prod = T::one();
            for (t, &o) in tensors.iter().zip(&offs) {
                prod *= t.entries()[o];
            }
            acc += prod;
            advance(&mut idx, &mut offs, &strides, d);
        }
        *slot = acc;
    }
    SymTensor::new(r, d, entries)
}

/// Odometer step over all variables, last variable fastest.
fn advance(idx: &mut [usize], offs: &mut [usize], strides: &[Vec<usize>], d: usize) {
    for var in (0..idx.len()).rev() {
        idx[var] += 1;
        for (o, st) in offs.iter_mut().zip(strides) {
            *o += st[var];
        }
        if idx[var] < d {
            return;
        }
        idx[var] = 0;
        for (o, st) in offs.iter_mut().zip(strides) {
            *o -= d * st[var];
        }
    }
}

/// `Π ‖A_i‖`.
pub fn norm_product<T: Scalar>(tensors: &[&SymTensor<T>]) -> T {
    tensors.iter().map(|t| t.norm()).fold(T::one(), |a, b| a * b)
}

/// The permutation `σ` on the survivors for which `π ∘ o ∘ σ` is increasing,
/// 0-based.
pub fn sorting_permutation(v: &PairSet, perms: &[Permutation]) -> Result<Permutation> {
    let pi = v.global_permutation(perms)?;
    let o = v.v_star();
    let mut sigma: Vec<usize> = (0..o.len()).collect();
    sigma.sort_by_key(|&i| pi[o[i]]);
    Permutation::new(sigma)
}

/// `‖R^{V^π}(A) − P_σ R^V(P_{π_1} A_1, ..., P_{π_ℓ} A_ℓ)‖`.
pub fn check_permutation_relation<T: Scalar>(
    v: &PairSet,
    tensors: &[&SymTensor<T>],
    perms: &[Permutation],
) -> Result<T> {
    check_inputs(v, tensors)?;
    let vpi = v.permuted(perms)?;
    let lhs = cancel(&vpi, tensors)?;
    let permuted: Vec<SymTensor<T>> = tensors
        .iter()
        .zip(perms)
        .map(|(t, p)| t.permute(p))
        .collect::<Result<_>>()?;
    let refs: Vec<&SymTensor<T>> = permuted.iter().collect();
    let sigma = sorting_permutation(v, perms)?;
    let rhs = cancel(v, &refs)?.permute(&sigma)?;
    Ok(lhs.sub(&rhs)?.norm())
}

/// `‖R^{V ∪ V''}(A_1, ..., A_{ℓ+1}) − R^{V'}(R^V(A_1, ..., A_ℓ), A_{ℓ+1})‖`.
pub fn check_composition<T: Scalar>(
    v: &PairSet,
    v_prime: &PairSet,
    tensors: &[&SymTensor<T>],
) -> Result<T> {
    let l = v.decomposition().num_intervals();
    if tensors.len() != l + 1 {
        return Err(Error::InvalidArgument(format!(
            "composition needs {} tensors, got {}",
            l + 1,
            tensors.len()
        )));
    }
    let joint = v.compose(v_prime)?;
    let lhs = cancel(&joint, tensors)?;
    let inner = cancel(v, &tensors[..l])?;
    let rhs = cancel(v_prime, &[&inner, tensors[l]])?;
    Ok(lhs.sub(&rhs)?.norm())
}

/// `Π ‖A_i‖ − ‖R^V(A_1, ..., A_ℓ)‖`.
pub fn norm_bound_slack<T: Scalar>(v: &PairSet, tensors: &[&SymTensor<T>]) -> Result<T> {
    let r = cancel(v, tensors)?;
    Ok(norm_product(tensors) - r.norm())
}

/// Both sides of the inner-product bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerBound<T> {
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> InnerBound<T> {
    pub fn slack(&self) -> T {
        self.rhs - self.lhs
    }
}

/// `|⟨R^V(A), R^V(B)⟩|` against `Π_j ‖R^{V_j}(A_j, B_j)‖`.
pub fn inner_bound<T: Scalar>(
    v: &PairSet,
    a: &[&SymTensor<T>],
    b: &[&SymTensor<T>],
) -> Result<InnerBound<T>> {
    let ra = cancel(v, a)?;
    let rb = cancel(v, b)?;
    let lhs = ra.inner(&rb)?.abs();
    let mut rhs = T::one();
    for (j, vj) in v.trace_sets().iter().enumerate() {
        rhs *= cancel(vj, &[a[j], b[j]])?.norm();
    }
    Ok(InnerBound { lhs, rhs })
}

/// `Π_j ‖R^{V_j}(A_j, B_j)‖ − |⟨R^V(A), R^V(B)⟩|`.
pub fn inner_bound_slack<T: Scalar>(
    v: &PairSet,
    a: &[&SymTensor<T>],
    b: &[&SymTensor<T>],
) -> Result<T> {
    Ok(inner_bound(v, a, b)?.slack())
}
