//! Free-boundary solver for two extended Blasius boundary-layer problems.
//!
//! The semi-infinite problem `f'(∞) = 1` is replaced by two conditions at an
//! unknown boundary `η_ε` (`f'(η_ε) = 1`, `f''(η_ε) = ε`), rescaled to
//! `[0, 1]` and solved with a collocation BVP solver. A truncated-boundary
//! shooting method cross-checks the results.
//!
//! ```
//! use fbf_blasius::{problems::{Family, ExtendedBlasiusSpec}, problems::solve_fbf, SolverConfig};
//!
//! let spec = ExtendedBlasiusSpec::<f64>::new(Family::Problem1, 1.5, 0.1);
//! let res = solve_fbf(&spec, &SolverConfig::default(), None).unwrap();
//! assert!((res.eta_eps - 2.7087).abs() < 1e-3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bvp;
pub mod linalg;
pub mod oracle;
pub mod problems;
pub mod scalar;
pub mod sweep;

pub use bvp::{
    assemble_residual, finite_difference_jacobian, newton_solve, refine_mesh, solve_bvp, BvpError,
    FailureReason, Mesh, OdeBvpProblem, SolutionGrid, SolveReport, SolverConfig,
};
pub use problems::{ExtendedBlasiusSpec, Family, FbfResult, RhsForm};
pub use scalar::Scalar;
pub use sweep::{SweepPlan, SweepRow, WarmStartPolicy};

pub type Mesh64 = bvp::Mesh<f64>;
pub type SolutionGrid64 = bvp::SolutionGrid<f64>;
pub type OdeBvpProblem64 = bvp::OdeBvpProblem<f64>;
pub type SolverConfig64 = bvp::SolverConfig<f64>;
pub type SolveReport64 = bvp::SolveReport<f64>;
pub type ExtendedBlasiusSpec64 = problems::ExtendedBlasiusSpec<f64>;
pub type FbfResult64 = problems::FbfResult<f64>;
pub type ProblemError64 = problems::ProblemError<f64>;
pub type ShootingConfig64 = oracle::ShootingConfig<f64>;
pub type SweepPlan64 = sweep::SweepPlan<f64>;
pub type SweepRow64 = sweep::SweepRow<f64>;
pub type SweepError64 = sweep::SweepError<f64>;

pub type Mesh32 = bvp::Mesh<f32>;
pub type SolutionGrid32 = bvp::SolutionGrid<f32>;
pub type SolverConfig32 = bvp::SolverConfig<f32>;
