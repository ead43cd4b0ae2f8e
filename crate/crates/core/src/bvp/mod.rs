//! Collocation solver for nonlinear first-order two-point BVPs on `[0, 1]`.
//!
//! Discretization is the 3-stage Lobatto IIIa scheme (Simpson collocation)
//! with a C¹ cubic Hermite interpolant per interval. Newton iterations use a
//! forward-difference Jacobian and residual-norm damping; the mesh is refined
//! by bisecting intervals whose interpolant defect exceeds the tolerance.

mod collocation;
mod jacobian;
mod mesh;
mod newton;
mod refine;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;

pub use collocation::{assemble_residual, interval_defects};
pub use jacobian::finite_difference_jacobian;
pub use mesh::{Interpolant, Mesh, SolutionGrid};
pub use newton::newton_solve;
pub use refine::{refine_mesh, solve_bvp};

pub type RhsFn<T> = dyn Fn(T, &[T], &mut [T]) + Send + Sync;
pub type BcFn<T> = dyn Fn(&[T], &[T], &mut [T]) + Send + Sync;

/// First-order system `u' = rhs(θ, u)` on `[0, 1]` with `n` boundary residuals
/// `bc(u(0), u(1)) = 0`.
#[derive(Clone)]
pub struct OdeBvpProblem<T> {
    dimension: usize,
    rhs: Arc<RhsFn<T>>,
    bc: Arc<BcFn<T>>,
}

impl<T: Scalar> OdeBvpProblem<T> {
    /// `rhs(θ, u, out)` writes `u'` into `out`; `bc(ua, ub, out)` writes the
    /// `dimension` boundary residuals.
    pub fn new<F, G>(dimension: usize, rhs: F, bc: G) -> Self
    where
        F: Fn(T, &[T], &mut [T]) + Send + Sync + 'static,
        G: Fn(&[T], &[T], &mut [T]) + Send + Sync + 'static,
    {
        assert!(dimension > 0, "problem dimension must be positive");
        Self {
            dimension,
            rhs: Arc::new(rhs),
            bc: Arc::new(bc),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    pub fn rhs_into(&self, theta: T, u: &[T], out: &mut [T]) {
        (self.rhs)(theta, u, out)
    }

    #[inline]
    pub fn bc_into(&self, left: &[T], right: &[T], out: &mut [T]) {
        (self.bc)(left, right, out)
    }

    pub fn rhs(&self, theta: T, u: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dimension];
        self.rhs_into(theta, u, &mut out);
        out
    }

    pub fn bc(&self, left: &[T], right: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dimension];
        self.bc_into(left, right, &mut out);
        out
    }
}

impl<T> fmt::Debug for OdeBvpProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeBvpProblem")
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Max-norm bound on both the Newton step and the collocation residual.
    pub newton_tol: T,
    /// Bound on the scaled interpolant defect in every interval.
    pub residual_tol: T,
    pub max_newton_iters: usize,
    pub damping_min: T,
    /// Relative forward-difference step, scaled by `1 + |u_j|`.
    pub fd_jacobian_step: T,
    pub max_mesh_points: usize,
    pub max_refinements: usize,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            newton_tol: T::lit(1e-10),
            residual_tol: T::lit(1e-8),
            max_newton_iters: 50,
            damping_min: T::lit(2f64.powi(-10)),
            fd_jacobian_step: T::lit(1e-7),
            max_mesh_points: 2000,
            max_refinements: 12,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<(), BvpError> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        let bad = |what: &str| Err(BvpError::InvalidConfig(what.to_string()));
        if !positive(self.newton_tol) {
            return bad("newton_tol must be positive");
        }
        if !positive(self.residual_tol) {
            return bad("residual_tol must be positive");
        }
        if !positive(self.fd_jacobian_step) {
            return bad("fd_jacobian_step must be positive");
        }
        if !(self.damping_min > T::zero() && self.damping_min <= T::one()) {
            return bad("damping_min must lie in (0, 1]");
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be at least 1");
        }
        if self.max_mesh_points < 2 {
            return bad("max_mesh_points must be at least 2");
        }
        if self.max_refinements == 0 {
            return bad("max_refinements must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureReason {
    NewtonStall,
    SingularJacobian,
    DampingExhausted,
    MeshBudgetExhausted,
    RefinementLimit,
}

impl FailureReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureReason::NewtonStall => "newton_stall",
            FailureReason::SingularJacobian => "singular_jacobian",
            FailureReason::DampingExhausted => "damping_exhausted",
            FailureReason::MeshBudgetExhausted => "mesh_budget_exhausted",
            FailureReason::RefinementLimit => "refinement_limit",
        }
    }
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One damped Newton iteration: the residual norm it started from, the full
/// step norm, and every `(damping, residual norm)` trial in the order tried.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonIteration<T> {
    pub residual_norm: T,
    pub step_norm: T,
    pub trials: Vec<(T, T)>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub converged: bool,
    pub newton_iterations: usize,
    pub final_mesh_points: usize,
    /// Max-norm of the assembled collocation residual at the returned grid.
    pub max_residual: T,
    /// Largest scaled interpolant defect, when it was evaluated.
    pub max_defect: Option<T>,
    pub refinements: usize,
    pub failure_reason: Option<FailureReason>,
    pub history: Vec<NewtonIteration<T>>,
}

impl<T: Scalar> fmt::Display for SolveReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "converged={} newton_iterations={} mesh_points={} refinements={} max_residual={:e}",
            self.converged,
            self.newton_iterations,
            self.final_mesh_points,
            self.refinements,
            self.max_residual
        )?;
        if let Some(d) = self.max_defect {
            write!(f, " max_defect={d:e}")?;
        }
        if let Some(r) = self.failure_reason {
            write!(f, " failure_reason={r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualLocation {
    Interval(usize),
    Boundary,
}

impl fmt::Display for ResidualLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidualLocation::Interval(i) => write!(f, "interval {i}"),
            ResidualLocation::Boundary => f.write_str("boundary conditions"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BvpError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite residual in {0}")]
    NonFiniteResidual(ResidualLocation),
    #[error("non-finite Jacobian column {column} after step reduction")]
    NonFiniteJacobian { column: usize },
    #[error("mesh_budget_exhausted: refinement needs {required} points, limit is {max}")]
    MeshBudgetExhausted { required: usize, max: usize },
    #[error("refinement round {round}: {source}")]
    InRound {
        round: usize,
        #[source]
        source: Box<BvpError>,
    },
}
