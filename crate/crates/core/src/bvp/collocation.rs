use crate::scalar::Scalar;

use super::mesh::node_slopes;
use super::{BvpError, OdeBvpProblem, ResidualLocation, SolutionGrid};

/// Scratch buffers for one interval's Simpson defect.
pub(crate) struct IntervalScratch<T> {
    mid_state: Vec<T>,
    mid_slope: Vec<T>,
}

impl<T: Scalar> IntervalScratch<T> {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            mid_state: vec![T::zero(); n],
            mid_slope: vec![T::zero(); n],
        }
    }
}

/// Lobatto IIIa defect on `[ta, tb]`, divided by `h`:
/// `(yb - ya)/h - (fa + 4 f(tm, ym) + fb)/6` with `ym` the Hermite midpoint.
#[allow(clippy::too_many_arguments)]
pub(crate) fn interval_residual<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    ta: T,
    ya: &[T],
    fa: &[T],
    tb: T,
    yb: &[T],
    fb: &[T],
    scratch: &mut IntervalScratch<T>,
    out: &mut [T],
) {
    let h = tb - ta;
    let half = T::lit(0.5);
    let eighth = T::lit(0.125);
    let sixth = T::one() / T::lit(6.0);
    let four = T::lit(4.0);
    for k in 0..ya.len() {
        scratch.mid_state[k] = half * (ya[k] + yb[k]) - eighth * h * (fb[k] - fa[k]);
    }
    problem.rhs_into(ta + half * h, &scratch.mid_state, &mut scratch.mid_slope);
    for k in 0..ya.len() {
        out[k] = (yb[k] - ya[k]) / h - sixth * (fa[k] + four * scratch.mid_slope[k] + fb[k]);
    }
}

pub(crate) fn residual_with_slopes<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
    slopes: &[T],
) -> Result<Vec<T>, BvpError> {
    let n = grid.dim();
    let nodes = grid.mesh().nodes();
    let intervals = grid.mesh().intervals();
    let mut res = vec![T::zero(); n * grid.len()];
    let mut scratch = IntervalScratch::new(n);
    for i in 0..intervals {
        let out = &mut res[i * n..(i + 1) * n];
        interval_residual(
            problem,
            nodes[i],
            grid.state(i),
            &slopes[i * n..(i + 1) * n],
            nodes[i + 1],
            grid.state(i + 1),
            &slopes[(i + 1) * n..(i + 2) * n],
            &mut scratch,
            out,
        );
        if out.iter().any(|v| !v.is_finite()) {
            return Err(BvpError::NonFiniteResidual(ResidualLocation::Interval(i)));
        }
    }
    let bc = &mut res[intervals * n..];
    problem.bc_into(grid.state(0), grid.state(intervals), bc);
    if bc.iter().any(|v| !v.is_finite()) {
        return Err(BvpError::NonFiniteResidual(ResidualLocation::Boundary));
    }
    Ok(res)
}

/// Collocation residual: `n` defect equations per interval followed by the
/// `n` boundary residuals. Interval rows are scaled by `1/h`, so they measure
/// a slope mismatch independent of the local mesh width. Zero exactly when
/// the grid is a discrete solution.
pub fn assemble_residual<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
) -> Result<Vec<T>, BvpError> {
    let slopes = node_slopes(problem, grid)?;
    residual_with_slopes(problem, grid, &slopes)
}

/// Scaled ODE residual `|S' - f(θ, S)| / (1 + |f|)` of the cubic interpolant,
/// maximized over components and over the two interior 5-point Lobatto
/// abscissae of each interval. The collocation condition forces the residual
/// to vanish at the midpoint, so the midpoint carries no information.
pub fn interval_defects<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
) -> Result<Vec<T>, BvpError> {
    let interp = grid.interpolant(problem)?;
    let mesh = grid.mesh();
    let offset = T::lit(21f64.sqrt() / 14.0);
    let half = T::lit(0.5);
    let mut f = vec![T::zero(); grid.dim()];
    let mut defects = Vec::with_capacity(mesh.intervals());
    for i in 0..mesh.intervals() {
        let h = mesh.width(i);
        let mut worst = T::zero();
        for t in [half - offset, half + offset] {
            let theta = mesh.nodes()[i] + t * h;
            let s = interp.eval(theta);
            let ds = interp.derivative(theta);
            problem.rhs_into(theta, &s, &mut f);
            for k in 0..s.len() {
                let d = (ds[k] - f[k]).abs() / (T::one() + f[k].abs());
                if !d.is_finite() {
                    return Err(BvpError::NonFiniteResidual(ResidualLocation::Interval(i)));
                }
                worst = worst.max(d);
            }
        }
        defects.push(worst);
    }
    Ok(defects)
}
