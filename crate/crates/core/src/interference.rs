//! Laplace transforms (MGFs) of the aggregate other-cell interference.
//!
//! `MGF(z; x) = E[exp(-z I)]` with `I = sum_n g_n / L_n` over the interferers
//! of one state, conditioned on every interferer having path loss at least
//! `x` (the serving BS holds the minimum). Unit-mean Rayleigh fading makes the
//! per-interferer factor `x / (x + z)`, and integrating it against the
//! intensity of the path-loss process gives Gauss hypergeometric functions.
//! Below the state's breakpoint `k D^alpha` a correction factor accounts for
//! the change of LOS probability at the ball boundary.
//!
//! All products are formed as sums of logarithms.

use crate::error::{Error, Result};
use crate::intensity::IntensityContext;
use crate::scenario::{LinkState, OperatorId, Scenario};
use crate::specfun::hyp2f1_interference_excess;

/// Log-MGF values below this are reported as `exp(LOG_FLOOR)` by the
/// linear-scale accessors.
pub const LOG_FLOOR: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfQuery {
    /// MGF argument, multiplying the fading-weighted inverse path losses.
    pub z: f64,
    /// Path loss of the serving link; interferers lie at or beyond it.
    pub x: f64,
    pub state: LinkState,
}

fn check_args(function: &'static str, z: f64, x: f64) -> Result<()> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::domain(function, format!("z = {z} must be finite and >= 0")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(function, format!("x = {x} must be finite and > 0")));
    }
    Ok(())
}

fn to_linear(log_value: f64, component: &str) -> Result<f64> {
    if log_value.is_nan() || log_value > 1e-9 {
        return Err(Error::numerical(
            component,
            format!("log-MGF {log_value} outside (-inf, 0]"),
        ));
    }
    Ok(log_value.max(LOG_FLOOR).min(0.0).exp())
}

/// `ln MGF_{I,S}(z; x)` for one operator's `state` interferers.
pub fn log_mgf_component(z: f64, x: f64, ctx: &IntensityContext, state: LinkState) -> Result<f64> {
    check_args("mgf_component", z, x)?;
    log_mgf_component_at(z, x, ctx, state)
}

pub(crate) fn log_mgf_component_at(
    z: f64,
    x: f64,
    ctx: &IntensityContext,
    state: LinkState,
) -> Result<f64> {
    let lambda = ctx.density();
    if lambda == 0.0 || z == 0.0 {
        return Ok(0.0);
    }
    let pl = ctx.path_loss();
    let ls = ctx.link_state();
    let alpha = pl.alpha(state);
    let d = 2.0 / alpha;
    let breakpoint = ctx.breakpoint(state);
    let pi_lambda = std::f64::consts::PI * lambda;
    let scaled = (x / pl.k()).powf(d);

    let near = hyp2f1_interference_excess(alpha, -z / x)?;
    let value = if x < breakpoint {
        let radius = ls.ball_radius();
        let boundary = hyp2f1_interference_excess(alpha, -z / breakpoint)?;
        -pi_lambda * scaled * near * ls.q_inner(state)
            - pi_lambda * (ls.q_outer(state) - ls.q_inner(state)) * radius * radius * boundary
    } else {
        -pi_lambda * scaled * near * ls.q_outer(state)
    };
    if !value.is_finite() {
        return Err(Error::Numerical {
            component: format!("mgf_component ({})", state.label()),
            detail: format!("nonfinite exponent at z = {z:e}, x = {x:e}"),
            error_estimate: None,
        });
    }
    // The exact exponent is nonpositive; cancellation between the two terms
    // can leave a rounding-level positive residue.
    Ok(value.min(0.0))
}

/// `MGF_{I,i,S}(z; x)` in `(0, 1]`.
pub fn mgf_component(query: &MgfQuery, ctx: &IntensityContext) -> Result<f64> {
    let log_value = log_mgf_component(query.z, query.x, ctx, query.state)?;
    to_linear(log_value, "mgf_component")
}

/// `ln` of the non-sharing MGF: LOS and NLOS interferers of operator `op`.
pub fn log_mgf_nonsharing(z: f64, x: f64, op: OperatorId, scenario: &Scenario) -> Result<f64> {
    check_args("mgf_nonsharing", z, x)?;
    let ctx = IntensityContext::for_operator(scenario, op);
    Ok(log_mgf_component_at(z, x, &ctx, LinkState::Los)?
        + log_mgf_component_at(z, x, &ctx, LinkState::Nlos)?)
}

pub fn mgf_nonsharing(z: f64, x: f64, op: OperatorId, scenario: &Scenario) -> Result<f64> {
    to_linear(log_mgf_nonsharing(z, x, op, scenario)?, "mgf_nonsharing")
}

/// `ln` of the sharing MGF: both operators' interferers, operator `j`'s
/// factors evaluated at `P_j z`.
pub fn log_mgf_sharing(z: f64, x: f64, scenario: &Scenario) -> Result<f64> {
    check_args("mgf_sharing", z, x)?;
    log_mgf_sharing_from(z, x, scenario, OperatorId::One)
}

/// Sharing log-MGF summed with `first`'s factors ahead of the other
/// operator's. Summing the serving operator first makes results exactly
/// invariant under relabelling the operators.
pub(crate) fn log_mgf_sharing_from(
    z: f64,
    x: f64,
    scenario: &Scenario,
    first: OperatorId,
) -> Result<f64> {
    let mut total = 0.0;
    for op in [first, first.other()] {
        let ctx = IntensityContext::for_operator(scenario, op);
        let zj = scenario.operator(op).power() * z;
        total += log_mgf_component_at(zj, x, &ctx, LinkState::Los)?;
        total += log_mgf_component_at(zj, x, &ctx, LinkState::Nlos)?;
    }
    Ok(total)
}

pub fn mgf_sharing(z: f64, x: f64, scenario: &Scenario) -> Result<f64> {
    to_linear(log_mgf_sharing(z, x, scenario)?, "mgf_sharing")
}
