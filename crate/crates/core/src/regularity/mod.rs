//! Path statistics: increment norms, exponential Orlicz norms, dyadic
//! Besov-Orlicz seminorms, scaling-exponent fits, moment growth and the
//! modulus-Hölder statistic.

mod besov;
mod fit;
mod growth;
mod modulus;
mod norms;
mod path;

pub use besov::{dyadic_besov_seminorm, dyadic_levels, BesovReport, LevelValue};
pub use fit::{default_levels, fit_power_law, least_squares, theta_slope_fit, SlopeFit};
pub use growth::{kendall_s, kendall_variance, moment_growth_check, quantile, GrowthCell, MomentGrowthReport, QUANTILES};
pub use modulus::{modulus, modulus_holder_for_chaos, modulus_holder_statistic, modulus_refinement, RefinementStudy};
pub use norms::{
    increment_lp_norm, increment_norm, increments, lp_norm, luxemburg_norm, p_grid, psup_norm, IncrementNorm,
    OrliczFunction, BISECTION_MAX_ITER, BISECTION_TOL, P_GRID_RATIO,
};
pub use path::{PathSample, Provenance};
