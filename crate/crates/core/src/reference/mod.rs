//! Reference solutions used for validation: stochastic collocation over a
//! deterministic finite-difference WENO solver, the exact Riemann solver,
//! and discrete norms.

pub mod collocation;
pub mod fd_weno;
pub mod norms;
pub mod riemann;

pub use collocation::{collocation_solve, CollocationPlan, CollocationResult, DEFAULT_COLLOCATION_NODES};
pub use fd_weno::{fd_solve, FdRun};
pub use norms::{l1_components, l1_distance, linf_distance, restrict_1d, restrict_2d, weighted_mean_std};
pub use riemann::{exact_riemann, exact_sod_stats, shock_tube_stats, ExactStats, RiemannSolution, WaveKind};
