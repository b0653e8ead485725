//! Fractionally filtered Hermite kernels, their discretization on a graded
//! cell grid, the functionals behind the regularity conditions, and a fast
//! path simulator.

mod discrete;
mod functionals;
mod grid;
mod kfunc;
mod kroute;
mod pair;
mod simulate;
mod spec;
mod verify;

pub use discrete::{build_kernel, DiscretizedKernel, GramPower, UNode, DENSE_CAP, GRAM_CAP};
pub use functionals::{
    c_from_norms, c_functional, c_functional_dense, f_functional, g1_envelope_ratio, q_functional, FOptions, PAIR_TOL,
};
pub use grid::{Grid, GridSpec, TAIL_TARGET};
pub use kfunc::KFunction;
pub use kroute::{ContractionRoute, LagPair, DEFAULT_RESOLUTION};
pub use pair::{filter_pair_integral, PowerKernel};
pub use simulate::{simulate_paths, Simulator};
pub use spec::{k_filter, k_integral, HermiteKernelSpec};
pub use verify::{
    sweep, verify_g1, verify_g2, verify_g4, DiscretizedFamily, FPoint, G1Report, G2Report, G4Options, G4Report,
    KernelFamily, LagStat, LinearKernel, SweepOptions, Sweep, Trend, ZeroKernel,
};
