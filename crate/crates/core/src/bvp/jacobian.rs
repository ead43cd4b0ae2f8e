use crate::linalg::{BandedMatrix, DenseMatrix, LinalgError};
use crate::scalar::Scalar;

use super::collocation::{interval_residual, residual_with_slopes, IntervalScratch};
use super::mesh::node_slopes;
use super::{BvpError, OdeBvpProblem, SolutionGrid};

/// Nonzero pattern of the collocation Jacobian as `(row, col, value)` triples
/// in the natural row order of [`super::assemble_residual`].
pub(crate) type Entries<T> = Vec<(usize, usize, T)>;

/// Forward differences of the residual w.r.t. one unknown, touching only the
/// rows that unknown enters: its two neighbouring intervals and, at the end
/// nodes, the boundary rows. Returns `None` on a non-finite evaluation.
#[allow(clippy::too_many_arguments)]
fn column<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
    slopes: &[T],
    base: &[T],
    node: usize,
    comp: usize,
    step: T,
    scratch: &mut IntervalScratch<T>,
    out: &mut Entries<T>,
) -> Option<()> {
    let n = grid.dim();
    let last = grid.len() - 1;
    let nodes = grid.mesh().nodes();
    let col = node * n + comp;

    let mut y = grid.state(node).to_vec();
    let orig = y[comp];
    y[comp] = orig + step * (T::one() + orig.abs());
    let delta = y[comp] - orig;
    let mut f = vec![T::zero(); n];
    problem.rhs_into(nodes[node], &y, &mut f);
    if f.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let slope = |i: usize| &slopes[i * n..(i + 1) * n];
    let mut res = vec![T::zero(); n];
    let start = out.len();
    let push = |row0: usize, res: &[T], out: &mut Entries<T>| {
        for k in 0..n {
            out.push((row0 + k, col, (res[k] - base[row0 + k]) / delta));
        }
    };
    if node > 0 {
        interval_residual(
            problem,
            nodes[node - 1],
            grid.state(node - 1),
            slope(node - 1),
            nodes[node],
            &y,
            &f,
            scratch,
            &mut res,
        );
        push((node - 1) * n, &res, out);
    }
    if node < last {
        interval_residual(
            problem,
            nodes[node],
            &y,
            &f,
            nodes[node + 1],
            grid.state(node + 1),
            slope(node + 1),
            scratch,
            &mut res,
        );
        push(node * n, &res, out);
    }
    if node == 0 {
        problem.bc_into(&y, grid.state(last), &mut res);
        push(last * n, &res, out);
    } else if node == last {
        problem.bc_into(grid.state(0), &y, &mut res);
        push(last * n, &res, out);
    }
    if out[start..].iter().all(|e| e.2.is_finite()) {
        Some(())
    } else {
        out.truncate(start);
        None
    }
}

pub(crate) fn fd_entries<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
    slopes: &[T],
    base: &[T],
    step: T,
) -> Result<Entries<T>, BvpError> {
    let n = grid.dim();
    let mut entries = Vec::with_capacity(grid.len() * n * 3 * n);
    let mut scratch = IntervalScratch::new(n);
    let ten = T::lit(10.0);
    for node in 0..grid.len() {
        for comp in 0..n {
            let ok = column(
                problem,
                grid,
                slopes,
                base,
                node,
                comp,
                step,
                &mut scratch,
                &mut entries,
            )
            .or_else(|| {
                column(
                    problem,
                    grid,
                    slopes,
                    base,
                    node,
                    comp,
                    step / ten,
                    &mut scratch,
                    &mut entries,
                )
            });
            if ok.is_none() {
                return Err(BvpError::NonFiniteJacobian {
                    column: node * n + comp,
                });
            }
        }
    }
    Ok(entries)
}

/// Forward-difference Jacobian of [`super::assemble_residual`], column `j`
/// perturbed by `step * (1 + |x_j|)`.
pub fn finite_difference_jacobian<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
    step: T,
) -> Result<DenseMatrix<T>, BvpError> {
    if !(step > T::zero()) {
        return Err(BvpError::InvalidConfig(
            "jacobian step must be positive".into(),
        ));
    }
    let slopes = node_slopes(problem, grid)?;
    let base = residual_with_slopes(problem, grid, &slopes)?;
    let entries = fd_entries(problem, grid, &slopes, &base, step)?;
    let mut m = DenseMatrix::zeros(base.len());
    for (i, j, v) in entries {
        m.set(i, j, v);
    }
    Ok(m)
}

/// Newton system in whichever storage the boundary structure allows.
pub(crate) enum LinearSystem<T> {
    /// `row_map[natural_row]` is the row's position in the band matrix.
    Banded {
        matrix: BandedMatrix<T>,
        row_map: Vec<usize>,
    },
    Dense(DenseMatrix<T>),
}

impl<T: Scalar> LinearSystem<T> {
    /// Orders boundary rows so left-only rows precede the interval equations
    /// and right-only rows follow them, which makes the matrix banded. Rows
    /// coupling both ends force the dense fallback.
    pub(crate) fn assemble(entries: Entries<T>, n: usize, nodes: usize) -> Self {
        let size = n * nodes;
        let bc0 = (nodes - 1) * n;
        let last_col0 = (nodes - 1) * n;
        let mut left = vec![false; n];
        let mut right = vec![false; n];
        for &(r, c, v) in &entries {
            if r >= bc0 && v != T::zero() {
                if c < n {
                    left[r - bc0] = true;
                }
                if c >= last_col0 {
                    right[r - bc0] = true;
                }
            }
        }
        if nodes < 3 || (0..n).any(|j| left[j] && right[j]) {
            let mut m = DenseMatrix::zeros(size);
            for (i, j, v) in entries {
                m.set(i, j, v);
            }
            return LinearSystem::Dense(m);
        }
        let left_rows: Vec<usize> = (0..n).filter(|&j| !right[j]).collect();
        let right_rows: Vec<usize> = (0..n).filter(|&j| right[j]).collect();
        let k = left_rows.len();
        let mut row_map = vec![0usize; size];
        for r in 0..bc0 {
            row_map[r] = r + k;
        }
        for (pos, &j) in left_rows.iter().enumerate() {
            row_map[bc0 + j] = pos;
        }
        for (pos, &j) in right_rows.iter().enumerate() {
            row_map[bc0 + j] = k + bc0 + pos;
        }
        let (mut lower, mut upper) = (0usize, 0usize);
        for &(r, c, _) in &entries {
            let r = row_map[r];
            if r > c {
                lower = lower.max(r - c);
            } else {
                upper = upper.max(c - r);
            }
        }
        let mut matrix = BandedMatrix::zeros(size, lower, upper);
        for (r, c, v) in entries {
            matrix.set(row_map[r], c, v);
        }
        LinearSystem::Banded { matrix, row_map }
    }

    /// Solves `J x = rhs` with `rhs` in natural row order.
    pub(crate) fn solve(self, rhs: &[T]) -> Result<Vec<T>, LinalgError> {
        match self {
            LinearSystem::Dense(m) => m.solve(rhs),
            LinearSystem::Banded { matrix, row_map } => {
                let mut b = vec![T::zero(); rhs.len()];
                for (r, &v) in rhs.iter().enumerate() {
                    b[row_map[r]] = v;
                }
                matrix.solve(&b)
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn is_banded(&self) -> bool {
        matches!(self, LinearSystem::Banded { .. })
    }
}
