//! Dense order-`n` tensors over `R^d`.
//!
//! Entries are stored row-major: the multi-index `(i_1, ..., i_n)` lives at
//! `sum_k i_k * d^(n-k)`. Slot indices and permutation images are 0-based.
//! An order-0 tensor carries a single entry and plays the role of a scalar.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Practical cap on `dim^order` for a single dense tensor.
pub const MAX_ENTRIES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTensor<T>", into = "RawTensor<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SymTensor<T> {
    order: usize,
    dim: usize,
    entries: Vec<T>,
    symmetric: bool,
}

#[derive(Serialize, Deserialize)]
struct RawTensor<T> {
    order: usize,
    dim: usize,
    entries: Vec<T>,
    #[serde(default)]
    symmetric: bool,
}

impl<T: Scalar> TryFrom<RawTensor<T>> for SymTensor<T> {
    type Error = Error;

    fn try_from(raw: RawTensor<T>) -> Result<Self> {
        let mut t = SymTensor::new(raw.order, raw.dim, raw.entries)?;
        t.symmetric = raw.symmetric;
        Ok(t)
    }
}

impl<T: Scalar> From<SymTensor<T>> for RawTensor<T> {
    fn from(t: SymTensor<T>) -> Self {
        RawTensor {
            order: t.order,
            dim: t.dim,
            entries: t.entries,
            symmetric: t.symmetric,
        }
    }
}

/// A permutation of `{0, ..., n-1}` given by its images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Transposition of `a` and `b` on `n` points.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(a, b);
        Self(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::InvalidArgument("tensor dimension must be positive".into()));
    }
    let mut len: usize = 1;
    for _ in 0..order {
        len = len
            .checked_mul(dim)
            .filter(|&l| l <= MAX_ENTRIES)
            .ok_or(Error::CapExceeded {
                what: "tensor entries",
                value: usize::MAX,
                cap: MAX_ENTRIES,
            })?;
    }
    Ok(len)
}

impl<T: Scalar> SymTensor<T> {
    pub fn new(order: usize, dim: usize, entries: Vec<T>) -> Result<Self> {
        let expected = checked_len(order, dim)?;
        if entries.len() != expected {
            return Err(Error::EntryCount {
                expected,
                found: entries.len(),
            });
        }
        Ok(Self {
            order,
            dim,
            entries,
            symmetric: order <= 1,
        })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Self::new(order, dim, vec![T::zero(); len])
    }

    /// Order-0 tensor holding `value`.
    pub fn scalar(value: T, dim: usize) -> Self {
        Self {
            order: 0,
            dim,
            entries: vec![value],
            symmetric: true,
        }
    }

    pub fn from_vector(v: &[T]) -> Result<Self> {
        Self::new(1, v.len(), v.to_vec())
    }

    /// Unit vector `e_i` in `R^dim` as an order-1 tensor.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![T::zero(); dim];
        v[i] = T::one();
        Self {
            order: 1,
            dim,
            entries: v,
            symmetric: true,
        }
    }

    /// `v_1 ⊗ ... ⊗ v_n` for equal-length vectors.
    pub fn elementary(vectors: &[&[T]]) -> Result<Self> {
        let dim = match vectors.first() {
            Some(v) => v.len(),
            None => return Err(Error::InvalidArgument("empty factor list".into())),
        };
        let mut acc = Self::scalar(T::one(), dim);
        for v in vectors {
            acc = acc.tensor_product(&Self::from_vector(v)?)?;
        }
        Ok(acc)
    }

    /// `v^{⊗n}`, flagged symmetric.
    pub fn rank_one_power(v: &[T], n: usize) -> Result<Self> {
        let mut t = Self::elementary(&vec![v; n])?;
        if n == 0 {
            t.dim = v.len();
        }
        t.symmetric = true;
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Value of an order-0 tensor.
    pub fn scalar_value(&self) -> Option<T> {
        (self.order == 0).then(|| self.entries[0])
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.order);
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Multi-index of a flat position.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        for slot in (0..self.order).rev() {
            idx[slot] = flat % self.dim;
            flat /= self.dim;
        }
        idx
    }

    pub fn get(&self, index: &[usize]) -> T {
        self.entries[self.flat_index(index)]
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            entries: self.entries.iter().map(|&x| x * a).collect(),
            symmetric: self.symmetric,
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            order: self.order,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
            symmetric: self.symmetric && other.symmetric,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(T::one(), other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.linear_combination(T::one(), other, -T::one())
    }

    /// Hilbert-Schmidt pairing of two tensors of equal shape.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&x, &y)| x * y)
            .sum())
    }

    pub fn norm(&self) -> T {
        self.entries.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&x, &y)| (x - y).abs())
            .fold(T::zero(), T::max))
    }

    /// `A ⊗ B` with `entries[(i, j)] = A[i] * B[j]`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        self.contract(other, 0)
    }

    /// `A ⊗_j B`: the first `j` slots of `A` are contracted against the
    /// first `j` slots of `B`; the survivors of `A` precede those of `B`.
    pub fn contract(&self, other: &Self, j: usize) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let max = self.order.min(other.order);
        if j > max {
            return Err(Error::ContractionOutOfRange { j, max });
        }
        let d = self.dim;
        let order = self.order + other.order - 2 * j;
        let len = checked_len(order, d)?;
        let shared = d.pow(j as u32);
        let left = self.entries.len() / shared;
        let right = other.entries.len() / shared;
        let mut out = vec![T::zero(); len];
        for c in 0..shared {
            let a_row = &self.entries[c * left..(c + 1) * left];
            let b_row = &other.entries[c * right..(c + 1) * right];
            for (a, &x) in a_row.iter().enumerate() {
                if x == T::zero() {
                    continue;
                }
                let dst = &mut out[a * right..(a + 1) * right];
                for (o, &y) in dst.iter_mut().zip(b_row) {
                    *o += x * y;
                }
            }
        }
        Ok(Self {
            order,
            dim: d,
            entries: out,
            symmetric: order <= 1,
        })
    }

    /// `P_θ`: slot `k` of the result carries slot `θ(k)` of the input.
    pub fn permute(&self, theta: &Permutation) -> Result<Self> {
        if theta.len() != self.order {
            return Err(Error::InvalidPermutation(format!(
                "length {} for a tensor of order {}",
                theta.len(),
                self.order
            )));
        }
        if theta.is_identity() {
            return Ok(self.clone());
        }
        let d = self.dim;
        let n = self.order;
        // stride in the input of the slot that feeds output slot k
        let input_strides: Vec<usize> = (0..n).map(|k| d.pow((n - 1 - k) as u32)).collect();
        let feed: Vec<usize> = theta.images().iter().map(|&m| input_strides[m]).collect();
        let mut out = vec![T::zero(); self.entries.len()];
        let mut idx = vec![0usize; n];
        let mut src = 0usize;
        for o in out.iter_mut() {
            *o = self.entries[src];
            for k in (0..n).rev() {
                idx[k] += 1;
                src += feed[k];
                if idx[k] < d {
                    break;
                }
                idx[k] = 0;
                src -= d * feed[k];
            }
        }
        Ok(Self {
            order: n,
            dim: d,
            entries: out,
            symmetric: self.symmetric,
        })
    }

    /// Average over all slot permutations. Each entry is replaced by the mean
    /// of its orbit, which equals the `n!`-term permutation average.
    pub fn symmetrize(&self) -> Self {
        if self.order <= 1 || self.symmetric {
            let mut t = self.clone();
            t.symmetric = true;
            return t;
        }
        let mut sums: HashMap<usize, (T, usize)> = HashMap::new();
        let keys: Vec<usize> = (0..self.entries.len())
            .map(|flat| {
                let mut idx = self.multi_index(flat);
                idx.sort_unstable();
                self.flat_index(&idx)
            })
            .collect();
        for (&key, &x) in keys.iter().zip(&self.entries) {
            let e = sums.entry(key).or_insert((T::zero(), 0));
            e.0 += x;
            e.1 += 1;
        }
        let entries = keys
            .iter()
            .map(|k| {
                let (s, c) = sums[k];
                s / T::of_usize(c)
            })
            .collect();
        Self {
            order: self.order,
            dim: self.dim,
            entries,
            symmetric: true,
        }
    }

    /// Largest deviation `|A[i] - A[π(i)]|` over all adjacent transpositions.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for k in 0..self.order.saturating_sub(1) {
            let p = Permutation::swap(self.order, k, k + 1);
            let q = self.permute(&p).expect("valid transposition");
            worst = worst.max(self.max_abs_diff(&q).expect("same shape"));
        }
        worst
    }

    pub fn cast<U: Scalar>(&self) -> SymTensor<U> {
        SymTensor {
            order: self.order,
            dim: self.dim,
            entries: self.entries.iter().map(|&x| U::of(x.as_f64())).collect(),
            symmetric: self.symmetric,
        }
    }

    /// Marks the tensor symmetric after checking it to `tol`.
    pub fn assert_symmetric(mut self, tol: T) -> Result<Self> {
        if self.symmetry_defect() > tol {
            return Err(Error::InvalidArgument("tensor is not symmetric".into()));
        }
        self.symmetric = true;
        Ok(self)
    }
}
