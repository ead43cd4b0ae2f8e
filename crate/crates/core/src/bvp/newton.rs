use crate::scalar::{max_norm, Scalar};

use super::collocation::residual_with_slopes;
use super::jacobian::{fd_entries, LinearSystem};
use super::mesh::node_slopes;
use super::{
    BvpError, FailureReason, NewtonIteration, OdeBvpProblem, SolutionGrid, SolveReport,
    SolverConfig,
};

fn residual<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
) -> Result<(Vec<T>, Vec<T>), BvpError> {
    let slopes = node_slopes(problem, grid)?;
    let r = residual_with_slopes(problem, grid, &slopes)?;
    Ok((r, slopes))
}

/// Damped Newton iteration on the collocation residual for a fixed mesh.
///
/// Each iteration tries the full step, then halves the damping factor while
/// the residual max-norm grows, down to `damping_min`. Stops once the
/// residual max-norm is below `newton_tol` and every step component is below
/// `newton_tol * (1 + |x_j|)`. Solver failures
/// are reported in the returned [`SolveReport`] together with the last
/// iterate; only invalid input or a non-finite starting residual is an `Err`.
pub fn newton_solve<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    initial: &SolutionGrid<T>,
    config: &SolverConfig<T>,
) -> Result<(SolutionGrid<T>, SolveReport<T>), BvpError> {
    config.validate()?;
    let n = problem.dimension();
    if initial.dim() != n {
        return Err(BvpError::DimensionMismatch {
            expected: n,
            actual: initial.dim(),
        });
    }
    let tol = config.newton_tol;
    let half = T::lit(0.5);

    let mut x = initial.clone();
    let (mut f, mut slopes) = residual(problem, &x)?;
    let mut f_norm = max_norm(&f);
    let mut history = Vec::new();

    let report = |x: &SolutionGrid<T>,
                  f_norm: T,
                  iterations: usize,
                  reason: Option<FailureReason>,
                  history: Vec<NewtonIteration<T>>| SolveReport {
        converged: reason.is_none(),
        newton_iterations: iterations,
        final_mesh_points: x.len(),
        max_residual: f_norm,
        max_defect: None,
        refinements: 0,
        failure_reason: reason,
        history,
    };

    for iter in 1..=config.max_newton_iters {
        let entries = fd_entries(problem, &x, &slopes, &f, config.fd_jacobian_step)?;
        let system = LinearSystem::assemble(entries, n, x.len());
        let step = match system.solve(&f) {
            Ok(mut s) => {
                s.iter_mut().for_each(|v| *v = -*v);
                s
            }
            Err(_) => {
                return Ok((
                    x.clone(),
                    report(
                        &x,
                        f_norm,
                        iter,
                        Some(FailureReason::SingularJacobian),
                        history,
                    ),
                ))
            }
        };
        let step_norm = max_norm(&step);
        let step_small = |lambda: T| {
            step.iter()
                .zip(x.states())
                .all(|(&d, &v)| (lambda * d).abs() < tol * (T::one() + v.abs()))
        };
        if !step_norm.is_finite() {
            return Ok((
                x.clone(),
                report(
                    &x,
                    f_norm,
                    iter,
                    Some(FailureReason::SingularJacobian),
                    history,
                ),
            ));
        }
        if f_norm < tol && step_small(T::one()) {
            history.push(NewtonIteration {
                residual_norm: f_norm,
                step_norm,
                trials: Vec::new(),
                accepted: true,
            });
            // the confirming solve applies no update
            return Ok((x.clone(), report(&x, f_norm, iter - 1, None, history)));
        }

        let mut lambda = T::one();
        let mut trials = Vec::new();
        let accepted = loop {
            let mut trial = x.clone();
            for (v, d) in trial.states_mut().iter_mut().zip(&step) {
                *v += lambda * *d;
            }
            match residual(problem, &trial) {
                Ok((tf, ts)) => {
                    let tn = max_norm(&tf);
                    trials.push((lambda, tn));
                    if tn <= f_norm || tn < tol {
                        break Some((trial, tf, ts, tn, lambda));
                    }
                }
                Err(_) => trials.push((lambda, T::infinity())),
            }
            lambda *= half;
            if lambda < config.damping_min {
                break None;
            }
        };
        let Some((trial, tf, ts, tn, lambda)) = accepted else {
            history.push(NewtonIteration {
                residual_norm: f_norm,
                step_norm,
                trials,
                accepted: false,
            });
            return Ok((
                x.clone(),
                report(
                    &x,
                    f_norm,
                    iter,
                    Some(FailureReason::DampingExhausted),
                    history,
                ),
            ));
        };
        history.push(NewtonIteration {
            residual_norm: f_norm,
            step_norm,
            trials,
            accepted: true,
        });
        let converged = tn < tol && step_small(lambda);
        x = trial;
        f = tf;
        slopes = ts;
        f_norm = tn;
        if converged {
            return Ok((x.clone(), report(&x, f_norm, iter, None, history)));
        }
    }
    let iters = config.max_newton_iters;
    Ok((
        x.clone(),
        report(&x, f_norm, iters, Some(FailureReason::NewtonStall), history),
    ))
}
