//! Average downlink rate via the MGF-based approach.
//!
//! For a typical mobile whose serving BS has path loss `x`, the conditional
//! ergodic rate in nats is
//!
//! ```text
//! J(x) = int_0^inf P e^{-z} / (P z + s2 x) * MGF(P z / s2; x) dz
//! ```
//!
//! Substituting `z = s * s2 * x / P` turns this into
//!
//! ```text
//! J(x) = int_0^inf e^{-s a} / (1 + s) * MGF(s x; x) ds,   a = s2 x / P,
//! ```
//!
//! which is what is integrated here: it stays well defined when the noise
//! power is zero, and `s = 1` marks where the integrand turns over regardless
//! of the SNR. The sharing kernel is the same with
//! `MGF~(s x / P_i; x) = prod_j MGF_j(P_j s x / P_i; x)`. Both integrals run
//! over `ln s`.
//!
//! The outer integrals average `J` against the law of the smallest path loss,
//! `exp(-Lambda(x)) Lambda_i'(x) dx`, in the variable `ln x`. They are cut
//! where the void probability leaves `[eps, 1 - eps]` and split at the
//! breakpoints `k D^alpha_S`, where the intensity density jumps.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::{invert_increasing, IntensityContext};
use crate::interference::{log_mgf_nonsharing, log_mgf_sharing_from};
use crate::quadrature::{integrate, QuadOptions};
use crate::scenario::{LinkState, OperatorId, Scenario};

/// Integrand magnitude, as `exp(-DECAY_NATS)`, beyond which the inner
/// integral is cut.
const DECAY_NATS: f64 = 60.0;

/// Spectrum/infrastructure setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setup {
    NonSharing,
    Sharing,
}

impl Setup {
    pub fn label(self) -> &'static str {
        match self {
            Setup::NonSharing => "nonsharing",
            Setup::Sharing => "sharing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Probability mass of the smallest path loss kept by the outer
    /// integrals; `1 - q` is dropped, split evenly between the two tails.
    pub outer_truncation_quantile: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            outer_truncation_quantile: 1.0 - 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", format!("{} not in (0, 1)", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", format!("{} must be > 0", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        let q = self.outer_truncation_quantile;
        if !(0.9999..1.0).contains(&q) {
            return Err(Error::invalid(
                "outer_truncation_quantile",
                format!("{q} not in [0.9999, 1)"),
            ));
        }
        Ok(())
    }

    fn options(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn tail_mass(&self) -> f64 {
        1.0 - self.outer_truncation_quantile
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

/// One spectral efficiency with its numerical diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateComponent {
    /// bit/s/Hz
    pub value: f64,
    /// Outer quadrature estimate plus the worst inner relative error scaled
    /// to the result.
    pub abs_error: f64,
    /// Path-loss range kept by the outer integral.
    pub x_lower: f64,
    pub x_upper: f64,
    pub evaluations: usize,
}

impl RateComponent {
    fn empty() -> Self {
        Self {
            value: 0.0,
            abs_error: 0.0,
            x_lower: 0.0,
            x_upper: 0.0,
            evaluations: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateDiagnostics {
    pub r_bar_1: RateComponent,
    pub r_bar_2: RateComponent,
    pub r_tilde_1: RateComponent,
    pub r_tilde_2: RateComponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub r_bar_1: f64,
    pub r_bar_2: f64,
    pub r_tilde_1: f64,
    pub r_tilde_2: f64,
    /// bit/s
    pub r_nsh: f64,
    /// bit/s
    pub r_sh: f64,
    pub diagnostics: RateDiagnostics,
}

impl RateReport {
    pub fn r_bar(&self, op: OperatorId) -> f64 {
        match op {
            OperatorId::One => self.r_bar_1,
            OperatorId::Two => self.r_bar_2,
        }
    }

    pub fn r_tilde(&self, op: OperatorId) -> f64 {
        match op {
            OperatorId::One => self.r_tilde_1,
            OperatorId::Two => self.r_tilde_2,
        }
    }

    pub fn aggregate(&self, setup: Setup) -> f64 {
        match setup {
            Setup::NonSharing => self.r_nsh,
            Setup::Sharing => self.r_sh,
        }
    }

    /// Error bound on `r_nsh` propagated from the component estimates.
    pub fn r_nsh_error(&self, scenario: &Scenario) -> f64 {
        let d = &self.diagnostics;
        scenario.operator(OperatorId::One).bandwidth() * d.r_bar_1.abs_error
            + scenario.operator(OperatorId::Two).bandwidth() * d.r_bar_2.abs_error
    }

    pub fn r_sh_error(&self, scenario: &Scenario) -> f64 {
        let d = &self.diagnostics;
        2.0 * total_bandwidth(scenario) * (d.r_tilde_1.abs_error + d.r_tilde_2.abs_error)
    }
}

fn total_bandwidth(scenario: &Scenario) -> f64 {
    scenario.operator(OperatorId::One).bandwidth() + scenario.operator(OperatorId::Two).bandwidth()
}

/// `int_0^inf e^{-s a} / (1 + s) exp(log_mgf(s)) ds` over `u = ln s`.
fn conditional_rate(
    noise_ratio: f64,
    log_mgf: impl Fn(f64) -> Result<f64>,
    qc: &QuadratureConfig,
) -> Result<Integral> {
    let exponent = |s: f64| -> Result<f64> { Ok(-s * noise_ratio + log_mgf(s)?) };

    let s_lower = 1e-13 * (1.0 / noise_ratio).min(1.0);
    let mut s_upper = 1.0;
    while exponent(s_upper)? > -DECAY_NATS {
        s_upper *= 4.0;
        if s_upper > 1e300 {
            return Err(Error::numerical(
                "conditional rate",
                "integrand does not decay: no noise and no interference",
            ));
        }
    }

    let (u_lo, u_hi) = (s_lower.ln(), s_upper.ln());
    let mut points = vec![u_lo];
    for knee in [0.0, -noise_ratio.ln()] {
        if knee.is_finite() && knee > u_lo && knee < u_hi {
            points.push(knee);
        }
    }
    points.push(u_hi);
    points.sort_by(f64::total_cmp);

    let q = integrate(
        |u| {
            let s = u.exp();
            Ok(s / (1.0 + s) * exponent(s)?.exp())
        },
        &points,
        &qc.options(),
    )?;
    Ok(Integral {
        value: q.value,
        abs_error: q.abs_error,
    })
}

fn check_pathloss(function: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(function, format!("x = {x} must be finite and > 0")));
    }
    Ok(())
}

/// Conditional rate (nats) of an operator-`op` mobile without sharing, given
/// serving path loss `x`.
pub fn j_bar(x: f64, op: OperatorId, scenario: &Scenario, qc: &QuadratureConfig) -> Result<Integral> {
    check_pathloss("j_bar", x)?;
    let power = scenario.operator(op).power();
    if power == 0.0 {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let noise_ratio = scenario.noise_power(op) * x / power;
    conditional_rate(noise_ratio, |s| log_mgf_nonsharing(s * x, x, op, scenario), qc)
        .map_err(|e| e.within(&format!("j_bar(op {}, x = {x:e})", op.number())))
}

/// Conditional rate (nats) under sharing for a mobile served by `op` at path
/// loss `x`, with interference from both operators.
pub fn j_tilde(x: f64, op: OperatorId, scenario: &Scenario, qc: &QuadratureConfig) -> Result<Integral> {
    check_pathloss("j_tilde", x)?;
    let power = scenario.operator(op).power();
    if power == 0.0 {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
        });
    }
    let noise_ratio = scenario.sharing_noise_power(op) * x / power;
    conditional_rate(
        noise_ratio,
        |s| log_mgf_sharing_from(s * x / power, x, scenario, op),
        qc,
    )
    .map_err(|e| e.within(&format!("j_tilde(op {}, x = {x:e})", op.number())))
}

/// `(1 / ln 2) int J(x) exp(-Lambda_assoc(x)) Lambda_serving'(x) dx`.
fn average_rate(
    serving: &IntensityContext,
    association: &[IntensityContext],
    conditional: impl Fn(f64) -> Result<Integral>,
    qc: &QuadratureConfig,
) -> Result<RateComponent> {
    qc.validate()?;
    if serving.density() == 0.0 {
        return Ok(RateComponent::empty());
    }
    let measure = |x: f64| association.iter().map(|c| c.measure_total_at(x)).sum::<f64>();
    let eps = 0.5 * qc.tail_mass();
    let k = serving.path_loss().k();
    let x_lower = invert_increasing(measure, eps, k)
        .ok_or_else(|| Error::numerical("rate truncation", "lower cut not found"))?;
    let x_upper = invert_increasing(measure, -eps.ln(), k)
        .ok_or_else(|| Error::numerical("rate truncation", "upper cut not found"))?;

    let (t_lo, t_hi) = (x_lower.ln(), x_upper.ln());
    let mut points = vec![t_lo];
    for state in LinkState::ALL {
        let t = serving.breakpoint(state).ln();
        if t > t_lo && t < t_hi {
            points.push(t);
        }
    }
    points.push(t_hi);
    points.sort_by(f64::total_cmp);

    let mut inner_rel = 0.0f64;
    let q = integrate(
        |t| {
            let x = t.exp();
            let j = conditional(x)?;
            if j.value > 0.0 {
                inner_rel = inner_rel.max(j.abs_error / j.value);
            }
            Ok(j.value * (-measure(x)).exp() * serving.density_total_at(x) * x)
        },
        &points,
        &qc.options(),
    )?;
    let value = q.value / LN_2;
    Ok(RateComponent {
        value,
        abs_error: q.abs_error / LN_2 + inner_rel * value.abs(),
        x_lower,
        x_upper,
        evaluations: q.evaluations,
    })
}

/// `R_bar_i`, bit/s/Hz: own-operator association and interference.
pub fn rate_nonsharing(op: OperatorId, scenario: &Scenario, qc: &QuadratureConfig) -> Result<RateComponent> {
    let ctx = IntensityContext::for_operator(scenario, op);
    average_rate(&ctx, &[ctx], |x| j_bar(x, op, scenario, qc), qc)
        .map_err(|e| e.within(&format!("r_bar_{}", op.number())))
}

/// `R_tilde_i`, bit/s/Hz: the part of the shared mobile's rate obtained while
/// served by operator `op`.
pub fn rate_sharing(op: OperatorId, scenario: &Scenario, qc: &QuadratureConfig) -> Result<RateComponent> {
    let serving = IntensityContext::for_operator(scenario, op);
    let other = IntensityContext::for_operator(scenario, op.other());
    average_rate(&serving, &[serving, other], |x| j_tilde(x, op, scenario, qc), qc)
        .map_err(|e| e.within(&format!("r_tilde_{}", op.number())))
}

fn both<T: Send>(
    f1: impl FnOnce() -> Result<T> + Send,
    f2: impl FnOnce() -> Result<T> + Send,
) -> Result<(T, T)> {
    let (a, b) = rayon::join(f1, f2);
    Ok((a?, b?))
}

/// `W_1 R_bar_1 + W_2 R_bar_2` or `2 (W_1 + W_2)(R_tilde_1 + R_tilde_2)`,
/// bit/s, computing only the components the setup needs.
pub fn aggregate_rate(setup: Setup, scenario: &Scenario, qc: &QuadratureConfig) -> Result<f64> {
    let (w1, w2) = (
        scenario.operator(OperatorId::One).bandwidth(),
        scenario.operator(OperatorId::Two).bandwidth(),
    );
    match setup {
        Setup::NonSharing => {
            let (r1, r2) = both(
                || rate_nonsharing(OperatorId::One, scenario, qc),
                || rate_nonsharing(OperatorId::Two, scenario, qc),
            )?;
            Ok(w1 * r1.value + w2 * r2.value)
        }
        Setup::Sharing => {
            let (r1, r2) = both(
                || rate_sharing(OperatorId::One, scenario, qc),
                || rate_sharing(OperatorId::Two, scenario, qc),
            )?;
            Ok(2.0 * (w1 + w2) * (r1.value + r2.value))
        }
    }
}

pub fn aggregate_rates(scenario: &Scenario, qc: &QuadratureConfig) -> Result<RateReport> {
    let ((r_bar_1, r_bar_2), (r_tilde_1, r_tilde_2)) = both(
        || {
            both(
                || rate_nonsharing(OperatorId::One, scenario, qc),
                || rate_nonsharing(OperatorId::Two, scenario, qc),
            )
        },
        || {
            both(
                || rate_sharing(OperatorId::One, scenario, qc),
                || rate_sharing(OperatorId::Two, scenario, qc),
            )
        },
    )?;
    let (w1, w2) = (
        scenario.operator(OperatorId::One).bandwidth(),
        scenario.operator(OperatorId::Two).bandwidth(),
    );
    Ok(RateReport {
        r_bar_1: r_bar_1.value,
        r_bar_2: r_bar_2.value,
        r_tilde_1: r_tilde_1.value,
        r_tilde_2: r_tilde_2.value,
        r_nsh: w1 * r_bar_1.value + w2 * r_bar_2.value,
        r_sh: 2.0 * (w1 + w2) * (r_tilde_1.value + r_tilde_2.value),
        diagnostics: RateDiagnostics {
            r_bar_1,
            r_bar_2,
            r_tilde_1,
            r_tilde_2,
        },
    })
}
