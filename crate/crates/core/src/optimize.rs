//! Density sweeps: the BS density maximizing an aggregate rate.
//!
//! A log-spaced grid is evaluated in parallel, then golden-section search in
//! `ln lambda` refines inside the two grid cells around the best point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::{aggregate_rate, QuadratureConfig, Setup};
use crate::scenario::{OperatorId, Scenario};

/// Which densities the sweep variable drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySweep {
    /// `lambda_1 = lambda_2 = lambda`.
    #[default]
    Shared,
    /// Only this operator's density varies; the other keeps its template value.
    PerOperator(OperatorId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySearch {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub grid_points: usize,
    pub refine_iters: usize,
    pub objective: Setup,
    pub sweep: DensitySweep,
}

impl DensitySearch {
    pub fn new(lambda_min: f64, lambda_max: f64, objective: Setup) -> Result<Self> {
        let search = Self {
            lambda_min,
            lambda_max,
            grid_points: 16,
            refine_iters: 40,
            objective,
            sweep: DensitySweep::Shared,
        };
        search.validate()?;
        Ok(search)
    }

    /// A range of width zero is accepted and evaluates the single point.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min.is_finite() && self.lambda_min > 0.0) {
            return Err(Error::invalid("lambda_min", format!("{} must be finite and > 0", self.lambda_min)));
        }
        if !(self.lambda_max.is_finite() && self.lambda_max >= self.lambda_min) {
            return Err(Error::invalid(
                "lambda_max",
                format!("{} must be finite and >= lambda_min", self.lambda_max),
            ));
        }
        if self.grid_points < 8 {
            return Err(Error::invalid("grid_points", format!("{} < 8", self.grid_points)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimumStatus {
    Interior,
    /// The best grid point is an end of the range and refinement stayed at
    /// that end; extend the range.
    Boundary,
    /// Grid rates agree to 1e-6 relative; the objective is flat in lambda.
    Plateau,
    /// Zero-width range.
    SinglePoint,
}

impl OptimumStatus {
    pub fn label(self) -> &'static str {
        match self {
            OptimumStatus::Interior => "interior",
            OptimumStatus::Boundary => "boundary",
            OptimumStatus::Plateau => "plateau",
            OptimumStatus::SinglePoint => "single_point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub lambda: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborCheck {
    pub delta: f64,
    pub rate_below: f64,
    pub rate_above: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOptimum {
    pub lambda_star: f64,
    /// Aggregate rate at `lambda_star`, bit/s.
    pub rate_star: f64,
    pub status: OptimumStatus,
    pub neighbor_check: NeighborCheck,
    /// Grid evaluations in increasing lambda.
    pub profile: Vec<ProfilePoint>,
}

pub const NEIGHBOR_DELTA: f64 = 0.02;
const PLATEAU_SPREAD: f64 = 1e-6;
// Quadrature noise allowance when comparing neighbours.
const NEIGHBOR_SLACK: f64 = 1e-8;

/// `template` with the swept density set to `lambda`.
pub fn scenario_at(template: &Scenario, sweep: DensitySweep, lambda: f64) -> Result<Scenario> {
    match sweep {
        DensitySweep::Shared => template.with_densities(lambda, lambda),
        DensitySweep::PerOperator(op) => {
            let params = template.operator(op).with_density(lambda)?;
            Ok(template.with_operator(op, params))
        }
    }
}

/// The search objective at one density.
pub fn objective_at(template: &Scenario, search: &DensitySearch, lambda: f64, qc: &QuadratureConfig) -> Result<f64> {
    aggregate_rate(search.objective, &scenario_at(template, search.sweep, lambda)?, qc)
}

pub fn optimal_density(template: &Scenario, search: &DensitySearch, qc: &QuadratureConfig) -> Result<DensityOptimum> {
    search.validate()?;
    qc.validate()?;
    let f = |lambda: f64| objective_at(template, search, lambda, qc);

    if search.lambda_min == search.lambda_max {
        let lambda = search.lambda_min;
        let rate = f(lambda)?;
        let neighbor_check = neighbors(&f, lambda, rate)?;
        return Ok(DensityOptimum {
            lambda_star: lambda,
            rate_star: rate,
            status: OptimumStatus::SinglePoint,
            neighbor_check,
            profile: vec![ProfilePoint { lambda, rate }],
        });
    }

    let (t_min, t_max) = (search.lambda_min.ln(), search.lambda_max.ln());
    let n = search.grid_points;
    let grid: Vec<f64> = (0..n)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (n - 1) as f64)
        .collect();
    let rates = grid
        .par_iter()
        .map(|&t| f(t.exp()))
        .collect::<Result<Vec<f64>>>()?;
    let profile: Vec<ProfilePoint> = grid
        .iter()
        .zip(&rates)
        .map(|(&t, &rate)| ProfilePoint { lambda: t.exp(), rate })
        .collect();

    // First maximum on ties, so the result does not depend on evaluation order.
    let mut best = 0;
    for i in 1..n {
        if rates[i] > rates[best] {
            best = i;
        }
    }
    let max = rates[best];
    let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
    if max - min <= PLATEAU_SPREAD * max.abs() {
        let lambda = profile[best].lambda;
        return Ok(DensityOptimum {
            lambda_star: lambda,
            rate_star: max,
            status: OptimumStatus::Plateau,
            neighbor_check: neighbors(&f, lambda, max)?,
            profile,
        });
    }

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n - 1)];
    let (t_star, rate_star) = golden_section(|t| f(t.exp()), lo, hi, grid[best], max, search.refine_iters)?;
    let lambda_star = t_star.exp();

    let at_edge = |t: f64, edge: f64| (t - edge).abs() <= 1e-6 * (hi - lo);
    let status = if (best == 0 && at_edge(t_star, t_min)) || (best == n - 1 && at_edge(t_star, t_max)) {
        OptimumStatus::Boundary
    } else {
        OptimumStatus::Interior
    };
    Ok(DensityOptimum {
        lambda_star,
        rate_star,
        status,
        neighbor_check: neighbors(&f, lambda_star, rate_star)?,
        profile,
    })
}

fn neighbors(f: impl Fn(f64) -> Result<f64>, lambda: f64, rate: f64) -> Result<NeighborCheck> {
    let rate_below = f(lambda * (1.0 - NEIGHBOR_DELTA))?;
    let rate_above = f(lambda * (1.0 + NEIGHBOR_DELTA))?;
    let limit = rate + NEIGHBOR_SLACK * rate.abs();
    Ok(NeighborCheck {
        delta: NEIGHBOR_DELTA,
        rate_below,
        rate_above,
        passed: rate_below <= limit && rate_above <= limit,
    })
}

/// Maximizes `f` on `[a, b]`; `(t0, f0)` is a known evaluation that the
/// result never falls below.
fn golden_section(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    t0: f64,
    f0: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = (t0, f0);
    let keep = |t: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 {
            *best = (t, v);
        }
    };
    if iters == 0 || b <= a {
        return Ok(best);
    }
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    keep(c, fc, &mut best);
    keep(d, fd, &mut best);
    let width = b - a;
    for _ in 0..iters {
        if b - a <= 1e-9 * width {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
            keep(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
            keep(d, fd, &mut best);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (t, v) = golden_section(|t| Ok(-(t - 0.3) * (t - 0.3)), -1.0, 1.0, 0.0, -0.09, 80).unwrap();
        assert!((t - 0.3).abs() < 1e-7);
        assert!(v <= 0.0 && v > -1e-13);
    }

    #[test]
    fn golden_section_keeps_seed_when_better() {
        let (t, v) = golden_section(|_| Ok(-1.0), 0.0, 1.0, 0.5, 2.0, 10).unwrap();
        assert_eq!((t, v), (0.5, 2.0));
    }

    #[test]
    fn search_validation() {
        assert!(DensitySearch::new(0.0, 1e-4, Setup::Sharing).is_err());
        assert!(DensitySearch::new(1e-4, 1e-5, Setup::Sharing).is_err());
        assert!(DensitySearch::new(1e-5, 1e-5, Setup::Sharing).is_ok());
        let mut s = DensitySearch::new(1e-6, 1e-3, Setup::NonSharing).unwrap();
        s.grid_points = 7;
        assert!(s.validate().is_err());
    }
}
