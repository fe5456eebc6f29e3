//! Intensity measure of the path-loss process and the law of the smallest
//! path loss.
//!
//! Mapping the BSs of one operator to their path losses `k r^alpha_S` gives a
//! Poisson process on the half-line. Its mean measure on `[0, x)` is a power
//! law in `x` with a change of slope at `x = k D^alpha_S`, where links leave
//! the inner ball of the link-state model.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scenario::{LinkState, LinkStateModel, OperatorId, PathLossParams, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityContext {
    density: f64,
    link_state: LinkStateModel,
    path_loss: PathLossParams,
}

impl IntensityContext {
    pub fn new(density: f64, link_state: LinkStateModel, path_loss: PathLossParams) -> Result<Self> {
        if !(density.is_finite() && density >= 0.0) {
            return Err(Error::invalid("density_lambda", format!("{density} must be finite and >= 0")));
        }
        Ok(Self {
            density,
            link_state,
            path_loss,
        })
    }

    pub fn for_operator(scenario: &Scenario, id: OperatorId) -> Self {
        Self {
            density: scenario.operator(id).density(),
            link_state: *scenario.link_state(),
            path_loss: *scenario.path_loss(),
        }
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn link_state(&self) -> &LinkStateModel {
        &self.link_state
    }

    pub fn path_loss(&self) -> &PathLossParams {
        &self.path_loss
    }

    /// `k D^alpha_S`, the path loss where the state's intensity changes slope.
    pub fn breakpoint(&self, state: LinkState) -> f64 {
        self.path_loss
            .breakpoint(state, self.link_state.ball_radius())
    }

    /// `Lambda_S([0, x))`: mean number of `state` BSs with path loss below `x`.
    pub fn measure(&self, x: f64, state: LinkState) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("intensity_measure_state", format!("x = {x} < 0")));
        }
        Ok(self.measure_at(x, state))
    }

    /// `Lambda_S'` at `x`, the density of the measure. At the breakpoint the
    /// outer-region branch is used.
    pub fn density_at(&self, x: f64, state: LinkState) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("intensity_density_state", format!("x = {x} <= 0")));
        }
        Ok(self.density_at_unchecked(x, state))
    }

    pub fn measure_total(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("intensity_measure_total", format!("x = {x} < 0")));
        }
        Ok(self.measure_total_at(x))
    }

    pub fn density_total(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("intensity_density_total", format!("x = {x} <= 0")));
        }
        Ok(self.density_total_at(x))
    }

    /// CDF of the smallest path loss, `1 - exp(-Lambda([0, x)))`.
    pub fn cdf_min_pathloss(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("cdf_min_pathloss", format!("x = {x} < 0")));
        }
        Ok(-(-self.measure_total_at(x)).exp_m1())
    }

    pub fn pdf_min_pathloss(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("pdf_min_pathloss", format!("x = {x} <= 0")));
        }
        Ok(self.density_total_at(x) * (-self.measure_total_at(x)).exp())
    }

    /// `Lambda([0, inf))`. The per-region LOS and NLOS probabilities sum to
    /// one, so at least one state keeps arriving outside the ball and the
    /// measure is unbounded whenever the density is positive.
    pub fn measure_limit(&self) -> f64 {
        if self.density == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub(crate) fn measure_at(&self, x: f64, state: LinkState) -> f64 {
        let ls = &self.link_state;
        let d = ls.ball_radius();
        let scaled = (x / self.path_loss.k()).powf(2.0 / self.path_loss.alpha(state));
        if x < self.breakpoint(state) {
            PI * self.density * ls.q_inner(state) * scaled
        } else {
            let (q_in, q_out) = (ls.q_inner(state), ls.q_outer(state));
            PI * self.density * (d * d * (q_in - q_out) + q_out * scaled)
        }
    }

    pub(crate) fn density_at_unchecked(&self, x: f64, state: LinkState) -> f64 {
        let alpha = self.path_loss.alpha(state);
        let q = if x < self.breakpoint(state) {
            self.link_state.q_inner(state)
        } else {
            self.link_state.q_outer(state)
        };
        2.0 * PI * self.density / (x * alpha) * (x / self.path_loss.k()).powf(2.0 / alpha) * q
    }

    pub(crate) fn measure_total_at(&self, x: f64) -> f64 {
        self.measure_at(x, LinkState::Los) + self.measure_at(x, LinkState::Nlos)
    }

    pub(crate) fn density_total_at(&self, x: f64) -> f64 {
        self.density_at_unchecked(x, LinkState::Los) + self.density_at_unchecked(x, LinkState::Nlos)
    }
}

/// Smallest `x > 0` with `f(x) >= target` for a continuous nondecreasing `f`
/// on the positive half-line, found by bisection in `ln x`. `None` when `f`
/// stays below `target`.
pub(crate) fn invert_increasing(f: impl Fn(f64) -> f64, target: f64, start: f64) -> Option<f64> {
    let mut lo = start;
    let mut hi = start;
    while f(lo) >= target {
        if lo < 1e-300 {
            return Some(lo);
        }
        hi = lo;
        lo *= 1e-3;
    }
    while f(hi) < target {
        if hi > 1e300 {
            return None;
        }
        lo = hi;
        hi *= 1e3;
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m.exp()) < target {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    Some(b.exp())
}
