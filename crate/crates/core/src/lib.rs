//! Stochastic Galerkin solvers for quasilinear hyperbolic systems with
//! uncertain inputs.
//!
//! The random inputs are expanded in an orthonormal Legendre chaos. The
//! physical system is symmetrized with the left eigenvectors of its flux
//! Jacobian before Galerkin projection, which keeps the coefficient system
//! symmetrically hyperbolic. Space is discretized with a path-conservative
//! finite-volume WENO scheme, time with third-order TVD Runge–Kutta, and 2D
//! problems are handled by dimensional splitting.

pub mod assembly;
pub mod basis;
pub mod driver;
pub mod error;
pub mod fv;
pub mod linalg;
pub mod model;
pub mod output;
pub mod problems;
pub mod reference;
pub mod splitting;
pub mod state;
pub mod time;
pub mod weno;

pub use assembly::{lf_split, FluctuationSplit, GalerkinMatrices, Membership, PathRule, SgSystem};
pub use basis::{gauss_rule, gpc_eval, mean_std, ChaosBasis, LegendreBasis, QuadratureRule};
pub use driver::{
    compare, convergence_study, exact_table, order_study, reference_case, run_case, CompareReport, FieldTable, LimiterSummary,
    OutputBundle, RunConfig, RunMeta, SliceSpec, SolverKind, StudyTable, Timings,
};
pub use error::{Error, Result};
pub use fv::{Boundary, CellField1D, FvScheme, LimiterEvent, LimiterKind, LimiterSettings, Mesh1D, Residual};
pub use model::{AdiabaticIndex, Axis, EigenStructure, EulerEquations, HyperbolicModel, SpaceDim, Symmetrizers};
pub use problems::{builtin_problem, exact_smooth, BoundaryKind, ProblemSetup};
pub use splitting::{split_coefficients, CellField2D, Mesh2D, Parity, SplitMode, SplitSchedule, SplitSolver};
pub use state::GpcState;
pub use time::{advance_by, advance_to, rk3_step, rk3_step_with, AdvanceLog, DtPolicy, StepController, StepReport};
