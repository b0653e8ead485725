//! Multiple Wiener-Itô integrals over `R^d`: evaluation, the product
//! expansion, and an independent moment oracle.

pub mod checks;
pub mod expansion;
pub mod hermite;
pub mod oracle;
pub mod wick;

pub use checks::{
    counterexample, covariance_identity_residual, gebelein_positive_check,
    hypercontractivity_check, Counterexample, GebeleinReport, HypercontractivityReport,
};
pub use expansion::{expand_product, ChaosExpansion, DEFAULT_EXPANSION_CAP};
pub use hermite::{hermite, hermite_coefficients, hermite_table};
pub use oracle::{isserlis, moment_oracle, Polynomial, ORACLE_MAX_DEGREE, ORACLE_MAX_DIM};
pub use wick::{wick_eval, wick_eval_at, wick_eval_rank_one_sum, GaussianSeed, HermiteForm};
