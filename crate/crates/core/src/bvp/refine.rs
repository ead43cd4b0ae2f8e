use crate::scalar::Scalar;

use super::{
    interval_defects, newton_solve, BvpError, FailureReason, Mesh, OdeBvpProblem, SolutionGrid,
    SolveReport, SolverConfig,
};

fn bisection_flags<T: Scalar>(defects: &[T], tol: T) -> Vec<bool> {
    defects.iter().map(|&d| d > tol).collect()
}

/// Bisects every interval whose interpolant defect exceeds `residual_tol`.
/// Returns the mesh unchanged when every interval passes.
pub fn refine_mesh<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
    config: &SolverConfig<T>,
) -> Result<Mesh<T>, BvpError> {
    let defects = interval_defects(problem, grid)?;
    refine_from_defects(grid.mesh(), &defects, config)
}

fn refine_from_defects<T: Scalar>(
    mesh: &Mesh<T>,
    defects: &[T],
    config: &SolverConfig<T>,
) -> Result<Mesh<T>, BvpError> {
    let flags = bisection_flags(defects, config.residual_tol);
    let added = flags.iter().filter(|&&f| f).count();
    if added == 0 {
        return Ok(mesh.clone());
    }
    let required = mesh.len() + added;
    if required > config.max_mesh_points {
        return Err(BvpError::MeshBudgetExhausted {
            required,
            max: config.max_mesh_points,
        });
    }
    mesh.bisect(&flags)
}

/// Alternates Newton solves and mesh refinement until every interval defect
/// is within `residual_tol`, carrying each converged solution to the refined
/// mesh through the collocation interpolant.
pub fn solve_bvp<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    initial: &SolutionGrid<T>,
    config: &SolverConfig<T>,
) -> Result<(SolutionGrid<T>, SolveReport<T>), BvpError> {
    config.validate()?;
    let in_round = |round: usize| {
        move |e: BvpError| BvpError::InRound {
            round,
            source: Box::new(e),
        }
    };
    let mut grid = initial.clone();
    let mut total_iters = 0;
    let mut history = Vec::new();
    for round in 0..=config.max_refinements {
        let (sol, mut rep) = newton_solve(problem, &grid, config).map_err(in_round(round))?;
        total_iters += rep.newton_iterations;
        history.append(&mut rep.history);
        rep.newton_iterations = total_iters;
        rep.refinements = round;
        if !rep.converged {
            rep.history = history;
            return Ok((sol, rep));
        }
        let defects = interval_defects(problem, &sol).map_err(in_round(round))?;
        let worst = defects.iter().fold(T::zero(), |m, &d| m.max(d));
        rep.max_defect = Some(worst);
        if worst <= config.residual_tol {
            rep.history = history;
            return Ok((sol, rep));
        }
        let fail = |mut rep: SolveReport<T>, reason, history| {
            rep.converged = false;
            rep.failure_reason = Some(reason);
            rep.history = history;
            rep
        };
        if round == config.max_refinements {
            return Ok((sol, fail(rep, FailureReason::RefinementLimit, history)));
        }
        let mesh = match refine_from_defects(sol.mesh(), &defects, config) {
            Ok(m) => m,
            Err(BvpError::MeshBudgetExhausted { .. }) => {
                return Ok((sol, fail(rep, FailureReason::MeshBudgetExhausted, history)));
            }
            Err(e) => return Err(in_round(round)(e)),
        };
        grid = sol.resample(problem, mesh).map_err(in_round(round))?;
    }
    unreachable!("loop returns on its final round")
}
