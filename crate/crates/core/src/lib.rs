//! Multiple Wiener-Itô integrals on finite-dimensional Hilbert spaces, the
//! tensor cancellation calculus behind their product formula, and a small
//! simulation laboratory for Hermite-type processes and their Besov-Orlicz
//! path statistics.
//!
//! The algebraic layers ([`tensor`], [`pairings`], [`cancellation`],
//! [`chaos`]) are generic over the scalar type through [`Scalar`]; the
//! aliases at the crate root fix the common `f64` instantiation. The
//! numerical layers ([`kernels`], [`regularity`]) work in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cancellation;
pub mod chaos;
pub mod error;
pub mod fuzz;
pub mod kernels;
pub mod pairings;
pub mod quad;
pub mod regularity;
pub mod rng;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use pairings::{IntervalDecomposition, PairSet};
pub use scalar::Scalar;
pub use tensor::{Permutation, SymTensor};

/// Dense tensor over `f64`.
pub type Tensor = tensor::SymTensor<f64>;
/// Dense tensor over `f32`.
pub type Tensor32 = tensor::SymTensor<f32>;
/// Chaos expansion with `f64` coefficients.
pub type Expansion = chaos::ChaosExpansion<f64>;
/// Gaussian seed vector over `f64`.
pub type Seed = chaos::GaussianSeed<f64>;
