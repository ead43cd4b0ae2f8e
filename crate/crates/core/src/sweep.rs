//! ε-continuation: solve a decreasing sequence of ε, optionally warm-starting
//! each solve from the previous converged grid.

use thiserror::Error;

use crate::bvp::{SolutionGrid, SolverConfig};
use crate::problems::{solve_fbf, ExtendedBlasiusSpec, ProblemError};
use crate::scalar::Scalar;

/// Default ε sequence of a sweep (no 1e-3 entry).
pub const DEFAULT_EPSILONS: [f64; 9] = [0.1, 0.01, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WarmStartPolicy {
    /// Each solve starts from the previous converged grid.
    #[default]
    Chain,
    /// Each solve starts from the default initial iterate.
    Cold,
}

#[derive(Debug, Clone)]
pub struct SweepPlan<T> {
    /// Family, exponent and rhs form; its `epsilon` is ignored.
    pub spec_base: ExtendedBlasiusSpec<T>,
    pub epsilons: Vec<T>,
    pub config: SolverConfig<T>,
    pub warm_start_policy: WarmStartPolicy,
}

impl<T: Scalar> SweepPlan<T> {
    pub fn new(spec_base: ExtendedBlasiusSpec<T>, epsilons: Vec<T>) -> Self {
        Self {
            spec_base,
            epsilons,
            config: SolverConfig::default(),
            warm_start_policy: WarmStartPolicy::Chain,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError<T>> {
        let bad = |m: String| Err(SweepError::InvalidPlan(m));
        if self.epsilons.is_empty() {
            return bad("epsilon list is empty".into());
        }
        if let Some(e) = self
            .epsilons
            .iter()
            .find(|e| !(**e > T::zero()) || !e.is_finite())
        {
            return bad(format!("epsilon must be > 0, got {e}"));
        }
        if let Some(w) = self.epsilons.windows(2).find(|w| !(w[1] < w[0])) {
            return bad(format!(
                "epsilons must be strictly decreasing ({} then {})",
                w[0], w[1]
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub epsilon: T,
    pub eta_eps: T,
    pub fpp0: T,
    pub newton_iterations: usize,
    pub mesh_points: usize,
}

#[derive(Debug, Error)]
pub enum SweepError<T: Scalar> {
    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),
    #[error("solve failed at epsilon = {epsilon} after {} completed rows: {source}", completed.len())]
    SolveFailed {
        completed: Vec<SweepRow<T>>,
        epsilon: T,
        #[source]
        source: ProblemError<T>,
    },
    #[error("convergence summary needs at least 2 rows, got {0}")]
    TooFewRows(usize),
}

/// Solves every ε of the plan in order and returns one row per ε.
pub fn run_sweep<T: Scalar>(plan: &SweepPlan<T>) -> Result<Vec<SweepRow<T>>, SweepError<T>> {
    plan.validate()?;
    let mut rows = Vec::with_capacity(plan.epsilons.len());
    let mut previous: Option<SolutionGrid<T>> = None;
    for &epsilon in &plan.epsilons {
        let spec = plan.spec_base.with_epsilon(epsilon);
        let warm = match plan.warm_start_policy {
            WarmStartPolicy::Chain => previous.as_ref(),
            WarmStartPolicy::Cold => None,
        };
        match solve_fbf(&spec, &plan.config, warm) {
            Ok(res) => {
                rows.push(SweepRow {
                    epsilon,
                    eta_eps: res.eta_eps,
                    fpp0: res.fpp0,
                    newton_iterations: res.report.newton_iterations,
                    mesh_points: res.report.final_mesh_points,
                });
                previous = Some(res.grid);
            }
            Err(source) => {
                return Err(SweepError::SolveFailed {
                    completed: rows,
                    epsilon,
                    source,
                })
            }
        }
    }
    Ok(rows)
}

/// Number of leading decimal digits (after the point) on which `a` and `b`
/// agree, comparing their 15-decimal renderings. Zero if sign or integer part
/// differ.
pub fn agreeing_decimals<T: Scalar>(a: T, b: T) -> u32 {
    let (a, b) = (
        a.to_f64().unwrap_or(f64::NAN),
        b.to_f64().unwrap_or(f64::NAN),
    );
    if !a.is_finite() || !b.is_finite() {
        return 0;
    }
    let (sa, sb) = (format!("{a:.15}"), format!("{b:.15}"));
    let (ia, fa) = sa.split_once('.').expect("fixed-point rendering");
    let (ib, fb) = sb.split_once('.').expect("fixed-point rendering");
    if ia != ib {
        return 0;
    }
    fa.chars()
        .zip(fb.chars())
        .take_while(|(x, y)| x == y)
        .count() as u32
}

/// Limit estimate (last `fpp0`) and the decimals shared by the last two rows.
pub fn convergence_summary<T: Scalar>(rows: &[SweepRow<T>]) -> Result<(T, u32), SweepError<T>> {
    if rows.len() < 2 {
        return Err(SweepError::TooFewRows(rows.len()));
    }
    let last = rows[rows.len() - 1].fpp0;
    let prev = rows[rows.len() - 2].fpp0;
    Ok((last, agreeing_decimals(prev, last)))
}
