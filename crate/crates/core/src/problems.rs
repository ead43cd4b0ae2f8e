//! Free-boundary normal forms of the two extended Blasius problems.
//!
//! With `θ = η/η_ε` and `u = (f, f', f'', η_ε)` both problems become a
//! four-state first-order system on `[0, 1]` with `u₄' = 0`, boundary
//! conditions `f(0) = f'(0) = 0` on the left and `f'(η_ε) = 1`,
//! `f''(η_ε) = ε` on the right.

use std::fmt;

use thiserror::Error;

use crate::bvp::{
    solve_bvp, BvpError, Mesh, OdeBvpProblem, SolutionGrid, SolveReport, SolverConfig,
};
use crate::scalar::Scalar;

/// Floor applied to `|f''|` inside fractional powers.
pub const CLAMP_FLOOR: f64 = 1e-14;
/// Node count of the default starting mesh.
pub const DEFAULT_MESH_POINTS: usize = 11;
/// Number of equally spaced samples in an [`FbfResult`].
pub const SAMPLE_COUNT: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `f''' (f'')^(P-1) + f f''/2 = 0`, `1 <= P < 2`.
    Problem1,
    /// `(|f''|^(P-1) f'')' + f f''/(P+1) = 0`, `P > 0`.
    Problem2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Problem1 => f.write_str("1"),
            Family::Problem2 => f.write_str("2"),
        }
    }
}

/// Which third-component formula Problem 2 uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsForm {
    /// `f''' = -f sign(f'') |f''|^(2-P) / (P (P+1))`, from expanding the
    /// derivative of `|f''|^(P-1) f''`.
    #[default]
    Corrected,
    /// `f''' = -f f'' / ((P+1) ((P-1)|f''|^(P-2) + |f''|^(P-1)))`, kept for
    /// comparison runs.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedBlasiusSpec<T> {
    pub family: Family,
    pub p_exponent: T,
    pub epsilon: T,
    pub rhs_form: RhsForm,
}

#[derive(Debug, Error)]
pub enum ProblemError<T: Scalar> {
    #[error("parameter out of range: {0}")]
    ParameterDomain(String),
    #[error("non-finite state {0:?}")]
    NonFiniteState(Vec<T>),
    #[error("warm start must have 4 states per node, got {0}")]
    InvalidWarmStart(usize),
    #[error(transparent)]
    Solver(#[from] BvpError),
    #[error("solve did not converge: {report}")]
    NotConverged { report: Box<SolveReport<T>> },
}

/// Checks the exponent bounds of a family.
pub fn check_exponent<T: Scalar>(family: Family, p: T) -> Result<(), String> {
    if !p.is_finite() {
        return Err(format!("P must be finite, got {p}"));
    }
    match family {
        Family::Problem1 if p < T::one() || p >= T::lit(2.0) => {
            Err(format!("problem 1 requires 1 <= P < 2, got P = {p}"))
        }
        Family::Problem2 if p <= T::zero() => Err(format!("problem 2 requires P > 0, got P = {p}")),
        _ => Ok(()),
    }
}

impl<T: Scalar> ExtendedBlasiusSpec<T> {
    pub fn new(family: Family, p_exponent: T, epsilon: T) -> Self {
        Self {
            family,
            p_exponent,
            epsilon,
            rhs_form: RhsForm::Corrected,
        }
    }

    pub fn with_rhs_form(mut self, rhs_form: RhsForm) -> Self {
        self.rhs_form = rhs_form;
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<(), ProblemError<T>> {
        check_exponent(self.family, self.p_exponent).map_err(ProblemError::ParameterDomain)?;
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return Err(ProblemError::ParameterDomain(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

fn is_integer<T: Scalar>(x: T) -> bool {
    x == x.round()
}

fn sign<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// `sign(x) |x|^e`; fractional and negative exponents see `|x|` floored at
/// [`CLAMP_FLOOR`].
fn signed_power<T: Scalar>(x: T, e: T) -> T {
    if is_integer(e) {
        let k = e.to_i32().expect("small integer exponent");
        let a = if k < 0 {
            x.abs().max(T::lit(CLAMP_FLOOR))
        } else {
            x.abs()
        };
        sign(x) * a.powi(k)
    } else {
        sign(x) * x.abs().max(T::lit(CLAMP_FLOOR)).powf(e)
    }
}

fn check_finite<T: Scalar>(u: &[T]) -> Result<(), ProblemError<T>> {
    if u.len() == 4 && u.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ProblemError::NonFiniteState(u.to_vec()))
    }
}

fn rhs1_raw<T: Scalar>(u: &[T], p: T) -> [T; 4] {
    let e = T::lit(2.0) - p;
    let power = if is_integer(e) {
        u[2].powi(e.to_i32().expect("small integer exponent"))
    } else {
        u[2].max(T::lit(CLAMP_FLOOR)).powf(e)
    };
    [
        u[3] * u[1],
        u[3] * u[2],
        -u[3] * T::lit(0.5) * u[0] * power,
        T::zero(),
    ]
}

fn rhs2_raw<T: Scalar>(u: &[T], p: T, form: RhsForm) -> [T; 4] {
    let third = match form {
        RhsForm::Corrected => {
            -u[3] * u[0] * signed_power(u[2], T::lit(2.0) - p) / (p * (p + T::one()))
        }
        RhsForm::Literal => {
            let a = u[2].abs().max(T::lit(CLAMP_FLOOR));
            let denom =
                (p + T::one()) * ((p - T::one()) * a.powf(p - T::lit(2.0)) + a.powf(p - T::one()));
            -u[3] * u[0] * u[2] / denom
        }
    };
    [u[3] * u[1], u[3] * u[2], third, T::zero()]
}

/// Normal-form right-hand side of Problem 1.
pub fn exblasius1_rhs<T: Scalar>(_theta: T, u: &[T], p: T) -> Result<[T; 4], ProblemError<T>> {
    check_finite(u)?;
    Ok(rhs1_raw(u, p))
}

/// Normal-form right-hand side of Problem 2 in the corrected form.
pub fn exblasius2_rhs<T: Scalar>(_theta: T, u: &[T], p: T) -> Result<[T; 4], ProblemError<T>> {
    check_finite(u)?;
    Ok(rhs2_raw(u, p, RhsForm::Corrected))
}

pub fn exblasius2_rhs_with<T: Scalar>(
    _theta: T,
    u: &[T],
    p: T,
    form: RhsForm,
) -> Result<[T; 4], ProblemError<T>> {
    check_finite(u)?;
    Ok(rhs2_raw(u, p, form))
}

/// `(f(0), f'(0), f'(η_ε) - 1, f''(η_ε) - ε)`.
pub fn fbf_boundary_residual<T: Scalar>(left: &[T], right: &[T], epsilon: T) -> [T; 4] {
    [left[0], left[1], right[1] - T::one(), right[2] - epsilon]
}

/// Starting iterate `(θ, 2 + θ, θ, 1)`.
pub fn initial_iterate<T: Scalar>(theta: T) -> [T; 4] {
    [theta, T::lit(2.0) + theta, theta, T::one()]
}

pub fn build_problem<T: Scalar>(
    spec: &ExtendedBlasiusSpec<T>,
) -> Result<OdeBvpProblem<T>, ProblemError<T>> {
    spec.validate()?;
    let p = spec.p_exponent;
    let eps = spec.epsilon;
    let bc = move |a: &[T], b: &[T], out: &mut [T]| {
        out.copy_from_slice(&fbf_boundary_residual(a, b, eps));
    };
    Ok(match spec.family {
        Family::Problem1 => OdeBvpProblem::new(
            4,
            move |_t: T, u: &[T], out: &mut [T]| out.copy_from_slice(&rhs1_raw(u, p)),
            bc,
        ),
        Family::Problem2 => {
            let form = spec.rhs_form;
            OdeBvpProblem::new(
                4,
                move |_t: T, u: &[T], out: &mut [T]| out.copy_from_slice(&rhs2_raw(u, p, form)),
                bc,
            )
        }
    })
}

/// Starting grid from [`initial_iterate`] on a uniform mesh.
pub fn default_initial_grid<T: Scalar>() -> SolutionGrid<T> {
    let mesh = Mesh::uniform(DEFAULT_MESH_POINTS).expect("valid default mesh");
    SolutionGrid::from_fn(mesh, 4, |t| initial_iterate(t).to_vec()).expect("4-state iterate")
}

/// Continues a converged grid for a larger `ε` toward `spec.epsilon`.
///
/// Beyond the old boundary `f' ≈ 1`, so `f''' = -c f (f'')^q` separates in
/// `f` and is integrated in closed form from the old end state. The old
/// profile is kept in physical `η` and followed by the tail model up to the
/// predicted boundary. A long tail gets its own uniform nodes; a short one
/// is absorbed by stretching the old mesh. Returns a clone when no extension
/// applies.
pub fn extend_to_epsilon<T: Scalar>(
    spec: &ExtendedBlasiusSpec<T>,
    grid: &SolutionGrid<T>,
    max_points: usize,
) -> SolutionGrid<T> {
    let n = grid.len();
    if grid.dim() != 4 || n < 2 {
        return grid.clone();
    }
    let end = grid.state(n - 1);
    let (f0, e0, eta0) = (end[0], end[2], end[3]);
    if !(spec.epsilon < e0) || !(eta0 > T::zero()) || !(f0 > T::zero()) {
        return grid.clone();
    }
    let p = spec.p_exponent;
    let c = match spec.family {
        Family::Problem1 => T::lit(0.5),
        Family::Problem2 => T::one() / (p * (p + T::one())),
    };
    // G(x) = x^(P-1)/(P-1), or ln x at P = 1
    let k = p - T::one();
    let g = |x: T| {
        if k == T::zero() {
            x.ln()
        } else {
            x.powf(k) / k
        }
    };
    let g_inv = |y: T| {
        if k == T::zero() {
            y.exp()
        } else if k * y > T::zero() {
            (k * y).powf(T::one() / k)
        } else {
            T::zero()
        }
    };
    let g0 = g(e0);
    let tail = (f0 * f0 + T::lit(2.0) * (g0 - g(spec.epsilon)) / c).sqrt() - f0;
    if !tail.is_finite() || !(tail > T::zero()) {
        return grid.clone();
    }
    let eta1 = eta0 + tail;
    let tail_state = |d: T| {
        let f = f0 + d;
        [
            f,
            end[1],
            g_inv(g0 - c * (f * f - f0 * f0) / T::lit(2.0)),
            eta1,
        ]
    };

    let old = grid.mesh().nodes();
    let last_width = (old[n - 1] - old[n - 2]) * eta0;
    let wanted = (T::from_usize_lossy(n) * tail / (T::lit(2.0) * eta1))
        .ceil()
        .to_usize()
        .unwrap_or(0);
    let m = wanted.clamp(2, n / 2);

    let (nodes, states) = if tail > last_width && n + m <= max_points {
        let stride = if n + m > max_points / 2 { 2 } else { 1 };
        let mut kept: Vec<usize> = (0..n).step_by(stride).collect();
        if kept.last() != Some(&(n - 1)) {
            kept.push(n - 1);
        }
        let mut nodes = Vec::with_capacity(kept.len() + m);
        let mut states = Vec::with_capacity(4 * (kept.len() + m));
        for &i in &kept {
            let s = grid.state(i);
            nodes.push(old[i] * eta0 / eta1);
            states.extend_from_slice(&[s[0], s[1], s[2], eta1]);
        }
        for j in 1..=m {
            let d = tail * T::from_usize_lossy(j) / T::from_usize_lossy(m);
            nodes.push(if j == m { T::one() } else { (eta0 + d) / eta1 });
            states.extend_from_slice(&tail_state(d));
        }
        (nodes, states)
    } else {
        let old_problem = match build_problem(&spec.with_epsilon(e0)) {
            Ok(p) => p,
            Err(_) => return grid.clone(),
        };
        let interp = match grid.interpolant(&old_problem) {
            Ok(i) => i,
            Err(_) => return grid.clone(),
        };
        let mut states = Vec::with_capacity(4 * n);
        for &t in old {
            let eta = t * eta1;
            if eta <= eta0 {
                let u = interp.eval(eta / eta0);
                states.extend_from_slice(&[u[0], u[1], u[2], eta1]);
            } else {
                states.extend_from_slice(&tail_state(eta - eta0));
            }
        }
        (old.to_vec(), states)
    };
    match Mesh::new(nodes).and_then(|mesh| SolutionGrid::new(mesh, 4, states)) {
        Ok(extended) => extended,
        Err(_) => grid.clone(),
    }
}

/// One physical-domain sample `(η, f, f', f'')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub eta: T,
    pub f: T,
    pub fp: T,
    pub fpp: T,
}

#[derive(Debug, Clone)]
pub struct FbfResult<T> {
    /// Node mean of `u₄`.
    pub eta_eps: T,
    /// `f''(0)`, the missing initial condition.
    pub fpp0: T,
    pub samples: Vec<Sample<T>>,
    pub report: SolveReport<T>,
    /// Converged normalized grid, reusable as a warm start.
    pub grid: SolutionGrid<T>,
}

impl<T: Scalar> FbfResult<T> {
    /// `max |u₄ - mean(u₄)|` over the nodes.
    pub fn free_boundary_spread(&self) -> T {
        self.grid
            .component(3)
            .iter()
            .fold(T::zero(), |m, &v| m.max((v - self.eta_eps).abs()))
    }
}

/// Solves the free-boundary problem from `warm_start`, continued to the new
/// `ε` by [`extend_to_epsilon`], or from [`initial_iterate`] on the default
/// mesh.
pub fn solve_fbf<T: Scalar>(
    spec: &ExtendedBlasiusSpec<T>,
    config: &SolverConfig<T>,
    warm_start: Option<&SolutionGrid<T>>,
) -> Result<FbfResult<T>, ProblemError<T>> {
    let problem = build_problem(spec)?;
    let initial = match warm_start {
        Some(g) if g.dim() != 4 => return Err(ProblemError::InvalidWarmStart(g.dim())),
        Some(g) => extend_to_epsilon(spec, g, config.max_mesh_points),
        None => default_initial_grid(),
    };
    let (grid, report) = solve_bvp(&problem, &initial, config)?;
    if !report.converged {
        return Err(ProblemError::NotConverged {
            report: Box::new(report),
        });
    }
    let u4 = grid.component(3);
    let eta_eps = u4.iter().fold(T::zero(), |s, &v| s + v) / T::from_usize_lossy(u4.len());
    let fpp0 = grid.state(0)[2];
    let interp = grid.interpolant(&problem)?;
    let last = T::from_usize_lossy(SAMPLE_COUNT - 1);
    let samples = (0..SAMPLE_COUNT)
        .map(|k| {
            let theta = if k == SAMPLE_COUNT - 1 {
                T::one()
            } else {
                T::from_usize_lossy(k) / last
            };
            let u = interp.eval(theta);
            Sample {
                eta: theta * eta_eps,
                f: u[0],
                fp: u[1],
                fpp: u[2],
            }
        })
        .collect();
    Ok(FbfResult {
        eta_eps,
        fpp0,
        samples,
        report,
        grid,
    })
}
