//! Truncated-boundary shooting: integrate the third-order equation from
//! `η = 0` with `f''(0) = s` by fixed-step RK4 and drive `f'(η_∞) - 1` to
//! zero in `s`. Shares no code with the collocation path.

use thiserror::Error;

use crate::problems::{check_exponent, Family};
use crate::scalar::Scalar;

/// Blow-up threshold on `|f'|` and `|f''|`.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
/// Bracket width at which bisection hands over to the secant iteration.
pub const BISECTION_WIDTH: f64 = 1e-4;
const MAX_SECANT_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig<T> {
    pub eta_infinity: T,
    pub rk4_steps: usize,
    /// Search interval for `f''(0)`.
    pub bracket: (T, T),
    pub secant_tol: T,
}

impl<T: Scalar> Default for ShootingConfig<T> {
    fn default() -> Self {
        Self {
            eta_infinity: T::lit(10.0),
            rk4_steps: 20_000,
            bracket: (T::lit(0.05), T::lit(1.5)),
            secant_tol: T::lit(1e-12),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError<T: Scalar> {
    #[error("invalid shooting configuration: {0}")]
    InvalidConfig(String),
    #[error("parameter out of range: {0}")]
    ParameterDomain(String),
    #[error("divergent shot: state blew up at eta = {eta}")]
    Divergent { eta: T },
    #[error(
        "bracket failure: residual has the same sign at s = {lo} ({g_lo}) and s = {hi} ({g_hi})"
    )]
    BracketFailure { lo: T, hi: T, g_lo: T, g_hi: T },
    #[error("secant iteration did not reach tolerance")]
    NoConvergence,
}

impl<T: Scalar> ShootingConfig<T> {
    pub fn validate(&self) -> Result<(), OracleError<T>> {
        let fail = |m: &str| Err(OracleError::InvalidConfig(m.to_string()));
        if !(self.eta_infinity > T::zero()) {
            return fail("eta_infinity must be positive");
        }
        if self.rk4_steps < 100 {
            return fail("rk4_steps must be at least 100");
        }
        if !(self.bracket.0 < self.bracket.1) {
            return fail("bracket must satisfy lo < hi");
        }
        if !(self.secant_tol > T::zero()) {
            return fail("secant_tol must be positive");
        }
        Ok(())
    }
}

/// `f''' = -c f (f'')^(2-P)` while `f'' > 0`.
#[derive(Clone, Copy)]
struct ThirdOrder<T> {
    coeff: T,
    exponent: T,
}

impl<T: Scalar> ThirdOrder<T> {
    fn new(family: Family, p: T) -> Self {
        let coeff = match family {
            Family::Problem1 => T::lit(0.5),
            Family::Problem2 => T::one() / (p * (p + T::one())),
        };
        Self {
            coeff,
            exponent: T::lit(2.0) - p,
        }
    }

    fn eval(&self, y: [T; 3]) -> [T; 3] {
        let third = if y[2] > T::zero() {
            -self.coeff * y[0] * y[2].powf(self.exponent)
        } else {
            T::zero()
        };
        [y[1], y[2], third]
    }

    fn rk4(&self, y: [T; 3], h: T) -> [T; 3] {
        let half = T::lit(0.5) * h;
        let add = |y: [T; 3], k: [T; 3], s: T| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
        let k1 = self.eval(y);
        let k2 = self.eval(add(y, k1, half));
        let k3 = self.eval(add(y, k2, half));
        let k4 = self.eval(add(y, k3, h));
        let sixth = h / T::lit(6.0);
        let two = T::lit(2.0);
        [
            y[0] + sixth * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
            y[1] + sixth * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
            y[2] + sixth * (k1[2] + two * k2[2] + two * k3[2] + k4[2]),
        ]
    }
}

/// Returns `f'(η_∞) - 1` for the trajectory with `(f, f', f'')(0) = (0, 0, s)`.
///
/// For `P > 1` the curvature reaches zero at a finite `η`; the step that
/// crosses zero is shortened by bisection to land on the crossing, after which
/// `f'' = 0` and `f'` is constant.
pub fn shoot<T: Scalar>(
    family: Family,
    p: T,
    s: T,
    cfg: &ShootingConfig<T>,
) -> Result<T, OracleError<T>> {
    cfg.validate()?;
    check_exponent(family, p).map_err(OracleError::ParameterDomain)?;
    let sys = ThirdOrder::new(family, p);
    let h = cfg.eta_infinity / T::from_usize_lossy(cfg.rk4_steps);
    let limit = T::lit(DIVERGENCE_LIMIT);
    let mut y = [T::zero(), T::zero(), s];
    for step in 0..cfg.rk4_steps {
        if !(y[2] > T::zero()) {
            break;
        }
        let next = sys.rk4(y, h);
        let eta = T::from_usize_lossy(step + 1) * h;
        if !next.iter().all(|v| v.is_finite()) || next[1].abs() > limit || next[2].abs() > limit {
            return Err(OracleError::Divergent { eta });
        }
        if next[2] > T::zero() {
            y = next;
            continue;
        }
        let (mut lo, mut hi) = (T::zero(), h);
        for _ in 0..60 {
            let mid = T::lit(0.5) * (lo + hi);
            if sys.rk4(y, mid)[2] > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        y = sys.rk4(y, lo);
        y[2] = T::zero();
        break;
    }
    Ok(y[1] - T::one())
}

/// Finds `s* = f''(0)` with bisection down to [`BISECTION_WIDTH`] followed by
/// secant steps until successive iterates differ by less than `secant_tol`.
pub fn solve_truncated<T: Scalar>(
    family: Family,
    p: T,
    cfg: &ShootingConfig<T>,
) -> Result<T, OracleError<T>> {
    cfg.validate()?;
    let g = |s: T| shoot(family, p, s, cfg);
    let (mut lo, mut hi) = cfg.bracket;
    let (mut g_lo, mut g_hi) = (g(lo)?, g(hi)?);
    if g_lo == T::zero() {
        return Ok(lo);
    }
    if g_hi == T::zero() {
        return Ok(hi);
    }
    if (g_lo > T::zero()) == (g_hi > T::zero()) {
        return Err(OracleError::BracketFailure { lo, hi, g_lo, g_hi });
    }
    let width = T::lit(BISECTION_WIDTH);
    while hi - lo > width {
        let mid = T::lit(0.5) * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid == T::zero() {
            return Ok(mid);
        }
        if (g_mid > T::zero()) == (g_lo > T::zero()) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    let (mut s0, mut g0, mut s1, mut g1) = (lo, g_lo, hi, g_hi);
    for _ in 0..MAX_SECANT_ITERS {
        if g1 == g0 {
            return Ok(s1);
        }
        let mut s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
        if !(s2 > lo && s2 < hi) {
            s2 = T::lit(0.5) * (lo + hi);
        }
        let g2 = g(s2)?;
        if (g2 > T::zero()) == (g_lo > T::zero()) {
            lo = s2;
        } else {
            hi = s2;
        }
        if (s2 - s1).abs() < cfg.secant_tol || g2 == T::zero() {
            return Ok(s2);
        }
        (s0, g0, s1, g1) = (s1, g1, s2, g2);
    }
    Err(OracleError::NoConvergence)
}
