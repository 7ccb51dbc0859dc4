//! The Cole-Hopf pair
//!
//! ```text
//! H(u) = exp(-1/2 int_0^x u) / int_0^1 exp(-1/2 int_0^x u)      C(v) = -2 v_x / v
//! ```
//!
//! together with membership tests for the smallness regions and numerical
//! checks of the three a-priori estimates that bound the heat state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Tolerance separating an analytic boundary zero from FD noise.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Slack granted to inequalities whose sides are computed with finite differences.
pub const FD_SLACK: f64 = 1e-3;

/// Heat state `v0 = H(u0)`. Positive everywhere, unit integral by construction.
pub fn hopf(u0: &GridFunction) -> GridFunction {
    let w = u0.cumulative_trapezoid().map(|s| (-0.5 * s).exp());
    let total = w.trapezoid();
    w.scale(1.0 / total)
}

/// Burgers state `u0 = C(v0) = -2 v0' / v0` with finite difference `v0'`.
pub fn cole(v0: &GridFunction) -> Result<GridFunction> {
    ensure_positive(v0)?;
    Ok(v0.derivative().zip_with(v0, |dv, v| -2.0 * dv / v))
}

pub(crate) fn ensure_positive(v: &GridFunction) -> Result<()> {
    let (min, index) = v.min();
    if min <= 0.0 {
        return Err(Error::NonPositiveState { min, index });
    }
    Ok(())
}

pub(crate) fn ensure_dirichlet(u: &GridFunction) -> Result<()> {
    let (left, right) = (u.first(), u.last());
    if left.abs() >= BOUNDARY_TOL || right.abs() >= BOUNDARY_TOL {
        return Err(Error::BoundaryViolation { left, right });
    }
    Ok(())
}

/// `2 e^n n < 1`, the smallness condition on `n = ||u0||`.
pub fn in_omega_b(norm_u0: f64) -> bool {
    2.0 * norm_u0.exp() * norm_u0 < 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionReport {
    pub norm_u0: f64,
    pub norm_du0: f64,
    /// Series converges for every `t > 0`.
    pub omega_b_member: bool,
    /// Additionally Dirichlet at both ends with square-integrable derivative,
    /// so the series converges uniformly down to `t = 0`.
    pub omega_b_small_member: bool,
}

pub fn check_region(u0: &GridFunction) -> RegionReport {
    let norm_u0 = u0.l2_norm();
    let norm_du0 = u0.derivative().l2_norm();
    let omega_b_member = in_omega_b(norm_u0);
    let omega_b_small_member = omega_b_member
        && u0.first().abs() < BOUNDARY_TOL
        && u0.last().abs() < BOUNDARY_TOL
        && norm_du0.is_finite();
    RegionReport {
        norm_u0,
        norm_du0,
        omega_b_member,
        omega_b_small_member,
    }
}

/// Outcome of checking one implication `hypothesis => conclusion`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub hypothesis_met: bool,
    pub conclusion_holds: bool,
}

impl PropertyReport {
    /// True unless the hypothesis holds and the conclusion does not.
    /// A failed hypothesis passes vacuously; see `hypothesis_met`.
    pub fn passed(&self) -> bool {
        !self.hypothesis_met || self.conclusion_holds
    }
}

/// If `int v0 = 1` and `||v0'|| < 1/4` then `sup |1 - v0| < 1/4` and
/// `||C(v0)|| < 2/3`.
pub fn check_property1(v0: &GridFunction) -> PropertyReport {
    let norm_dv = v0.derivative().l2_norm();
    let hypothesis_met = (v0.trapezoid() - 1.0).abs() < 1e-6 && norm_dv < 0.25;
    if !hypothesis_met {
        return PropertyReport {
            hypothesis_met,
            conclusion_holds: false,
        };
    }
    let sup_dev = v0.map(|v| 1.0 - v).sup_norm();
    // sup |1 - v0| < 1/4 keeps v0 positive, so C is defined.
    let conclusion_holds = sup_dev < 0.25 + FD_SLACK
        && cole(v0).is_ok_and(|u0| u0.l2_norm() < 2.0 / 3.0 + FD_SLACK);
    PropertyReport {
        hypothesis_met,
        conclusion_holds,
    }
}

/// For every `u0`, with `v0 = H(u0)`:
/// `sup |v0| <= e^{||u0||}` and `||v0'|| <= e^{||u0||} ||u0|| / 2`.
pub fn check_property2(u0: &GridFunction) -> PropertyReport {
    let n = u0.l2_norm();
    let v0 = hopf(u0);
    let bound = n.exp();
    let conclusion_holds = v0.sup_norm() <= bound + FD_SLACK
        && v0.derivative().l2_norm() <= 0.5 * bound * n + FD_SLACK;
    PropertyReport {
        hypothesis_met: true,
        conclusion_holds,
    }
}

/// For `u0` vanishing at both ends, with `v0 = H(u0)`:
/// `||v0''|| <= e^{||u0||} ||u0'|| (1 + ||u0|| / 2) / 2`.
pub fn check_property3(u0: &GridFunction) -> Result<PropertyReport> {
    ensure_dirichlet(u0)?;
    let n = u0.l2_norm();
    let dn = u0.derivative().l2_norm();
    let lhs = hopf(u0).second_derivative().l2_norm();
    let rhs = 0.5 * n.exp() * dn * (1.0 + 0.5 * n);
    Ok(PropertyReport {
        hypothesis_met: true,
        conclusion_holds: lhs <= rhs + FD_SLACK,
    })
}
