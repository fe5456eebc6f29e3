//! System-level Monte Carlo simulator, independent of the analytic pipeline.
//!
//! Each replicate draws both operators' BSs as homogeneous PPPs in a disc
//! around the typical mobile at the origin, thins them into LOS/NLOS with the
//! two-ball probabilities, attaches unit-mean exponential (Rayleigh power)
//! fading, associates by smallest path loss and evaluates the SINR directly.
//!
//! Points are generated in order of increasing distance
//! (`r_n^2 = r_{n-1}^2 + E_n / (pi lambda)`), with the per-point state and
//! fading drawn right after each radius. A larger window therefore extends a
//! realization without changing its inner part. Replicate `i` of operator
//! `j` uses ChaCha stream `2 i + j` of the configured seed, and every
//! reduction runs in replicate order, so results do not depend on the thread
//! count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::{invert_increasing, IntensityContext};
use crate::scenario::{LinkState, OperatorId, PathLossParams, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    #[default]
    RayleighUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub window_radius: f64,
    pub num_realizations: usize,
    pub rng_seed: u64,
    pub fading: FadingModel,
}

impl SimConfig {
    pub fn new(window_radius: f64, num_realizations: usize, rng_seed: u64) -> Result<Self> {
        let cfg = Self {
            window_radius,
            num_realizations,
            rng_seed,
            fading: FadingModel::RayleighUnit,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration with the window from [`default_window_radius`].
    pub fn for_scenario(scenario: &Scenario, num_realizations: usize, rng_seed: u64) -> Result<Self> {
        Self::new(default_window_radius(scenario), num_realizations, rng_seed)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window_radius.is_finite() && self.window_radius > 0.0) {
            return Err(Error::invalid(
                "window_radius",
                format!("{} must be finite and > 0", self.window_radius),
            ));
        }
        if self.num_realizations < 1 {
            return Err(Error::invalid("num_realizations", "must be at least 1"));
        }
        Ok(())
    }
}

/// Void probability left outside the default window for the serving link.
const WINDOW_TAIL: f64 = 1e-6;
/// Share of the mean interference, seen from a typical serving distance,
/// allowed to fall outside the default window.
const INTERFERENCE_TAIL: f64 = 1e-3;
/// Cap on the expected number of BSs, both operators together, in the
/// default window.
const WINDOW_POINT_BUDGET: f64 = 4e4;

/// `int_r^inf p_s(u) u^{1 - alpha_s} du` summed over link states: mean
/// interference from beyond distance `r`, up to `2 pi lambda / k`.
fn interference_beyond(scenario: &Scenario, r: f64) -> f64 {
    let ls = scenario.link_state();
    let pl = scenario.path_loss();
    let d = ls.ball_radius();
    let power_tail = |a: f64, from: f64| from.powf(2.0 - a) / (a - 2.0);
    LinkState::ALL
        .into_iter()
        .map(|state| {
            let a = pl.alpha(state);
            let outer = ls.q_outer(state) * power_tail(a, r.max(d));
            if r < d {
                outer + ls.q_inner(state) * (power_tail(a, r) - power_tail(a, d))
            } else {
                outer
            }
        })
        .sum()
}

/// Smallest disc such that, for every active operator, the path loss at the
/// edge exceeds the `1 - 1e-6` quantile of its smallest path loss. Never
/// below ten ball radii.
pub fn association_window_radius(scenario: &Scenario) -> f64 {
    let pl = scenario.path_loss();
    let alpha_min = pl.alpha(LinkState::Los).min(pl.alpha(LinkState::Nlos));
    let mut radius = 10.0 * scenario.link_state().ball_radius();
    for op in OperatorId::ALL {
        if scenario.operator(op).density() <= 0.0 {
            continue;
        }
        let ctx = IntensityContext::for_operator(scenario, op);
        if let Some(x) = invert_increasing(|x| ctx.measure_total_at(x), -WINDOW_TAIL.ln(), pl.k()) {
            radius = radius.max((x / pl.k()).powf(1.0 / alpha_min));
        }
    }
    radius
}

/// [`association_window_radius`], widened until at most a `1e-3` share of
/// the mean interference beyond half the mean nearest-neighbour distance of
/// each operator lies outside, or until the window holds 4e4 BSs on
/// average, whichever is smaller.
pub fn default_window_radius(scenario: &Scenario) -> f64 {
    let association = association_window_radius(scenario);
    let mut radius = association;
    for op in OperatorId::ALL {
        let density = scenario.operator(op).density();
        if density <= 0.0 {
            continue;
        }
        let allowed = INTERFERENCE_TAIL * interference_beyond(scenario, 0.5 / density.sqrt());
        if interference_beyond(scenario, radius) <= allowed {
            continue;
        }
        let mut lo = radius.ln();
        let mut hi = lo + 1.0;
        while interference_beyond(scenario, hi.exp()) > allowed {
            lo = hi;
            hi += 1.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if interference_beyond(scenario, mid.exp()) > allowed {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        radius = hi.exp();
    }
    let total: f64 = OperatorId::ALL.iter().map(|&op| scenario.operator(op).density()).sum();
    if total > 0.0 {
        radius = radius.min((WINDOW_POINT_BUDGET / (std::f64::consts::PI * total)).sqrt());
    }
    radius.max(association)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseStation {
    pub distance: f64,
    pub state: LinkState,
    pub fading_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetworkRealization {
    pub operators: [Vec<BaseStation>; 2],
}

impl NetworkRealization {
    pub fn operator(&self, id: OperatorId) -> &[BaseStation] {
        &self.operators[id.slot()]
    }
}

fn replicate_rng(seed: u64, replicate: u64, op: OperatorId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * replicate + op.slot() as u64);
    rng
}

/// Draws one network realization; deterministic in `(rng_seed, replicate)`.
pub fn sample_network(scenario: &Scenario, sim: &SimConfig, replicate: u64) -> NetworkRealization {
    sample_within(scenario, sim, replicate, sim.window_radius)
}

/// The part of realization `replicate` inside `radius`.
fn sample_within(scenario: &Scenario, sim: &SimConfig, replicate: u64, radius: f64) -> NetworkRealization {
    let mut realization = NetworkRealization::default();
    let link_state = scenario.link_state();
    let r2_max = radius * radius;
    for op in OperatorId::ALL {
        let density = scenario.operator(op).density();
        if density <= 0.0 {
            continue;
        }
        let mut rng = replicate_rng(sim.rng_seed, replicate, op);
        let points = &mut realization.operators[op.slot()];
        let mut r2 = 0.0;
        loop {
            let step: f64 = Exp1.sample(&mut rng);
            r2 += step / (std::f64::consts::PI * density);
            if r2 > r2_max {
                break;
            }
            let distance = r2.sqrt();
            let p_los = link_state
                .los_probability(distance)
                .expect("distance is nonnegative");
            let state = if rng.random::<f64>() < p_los {
                LinkState::Los
            } else {
                LinkState::Nlos
            };
            let fading_gain = match sim.fading {
                FadingModel::RayleighUnit => Exp1.sample(&mut rng),
            };
            points.push(BaseStation {
                distance,
                state,
                fading_gain,
            });
        }
    }
    realization
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssociationSet {
    Operator(OperatorId),
    Union,
}

impl AssociationSet {
    fn operators(self) -> &'static [OperatorId] {
        match self {
            AssociationSet::Operator(OperatorId::One) => &[OperatorId::One],
            AssociationSet::Operator(OperatorId::Two) => &[OperatorId::Two],
            AssociationSet::Union => &OperatorId::ALL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub path_loss: f64,
    pub operator: OperatorId,
    pub index: usize,
}

fn bs_path_loss(pl: &PathLossParams, bs: &BaseStation) -> f64 {
    pl.k() * bs.distance.powf(pl.alpha(bs.state))
}

/// Smallest-path-loss association over `set`, ignoring fading. `None` when
/// the set has no BS (no coverage).
pub fn min_pathloss(
    realization: &NetworkRealization,
    set: AssociationSet,
    path_loss: &PathLossParams,
) -> Option<Association> {
    let mut best: Option<Association> = None;
    for &op in set.operators() {
        for (index, bs) in realization.operator(op).iter().enumerate() {
            let l = bs_path_loss(path_loss, bs);
            if best.is_none_or(|b| l < b.path_loss) {
                best = Some(Association {
                    path_loss: l,
                    operator: op,
                    index,
                });
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMode {
    NonSharing(OperatorId),
    Sharing,
}

impl RateMode {
    pub fn label(self) -> &'static str {
        match self {
            RateMode::NonSharing(OperatorId::One) => "nonsharing_op1",
            RateMode::NonSharing(OperatorId::Two) => "nonsharing_op2",
            RateMode::Sharing => "sharing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// Mean of `log2(1 + SINR)`, bit/s/Hz.
    pub mean: f64,
    pub stderr: f64,
    pub no_coverage_fraction: f64,
    pub realizations: usize,
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Spectral efficiency of the typical mobile in one realization, `None` when
/// no BS of the association set exists.
pub fn realization_rate(
    realization: &NetworkRealization,
    scenario: &Scenario,
    mode: RateMode,
) -> Option<f64> {
    let pl = scenario.path_loss();
    let (set, noise) = match mode {
        RateMode::NonSharing(op) => (AssociationSet::Operator(op), None),
        RateMode::Sharing => (AssociationSet::Union, Some(())),
    };
    let serving = min_pathloss(realization, set, pl)?;
    let noise = match noise {
        None => scenario.noise_power(serving.operator),
        Some(()) => scenario.sharing_noise_power(serving.operator),
    };
    let mut interference = 0.0;
    let mut signal = 0.0;
    for &op in set.operators() {
        let power = scenario.operator(op).power();
        for (index, bs) in realization.operator(op).iter().enumerate() {
            let received = power * bs.fading_gain / bs_path_loss(pl, bs);
            if op == serving.operator && index == serving.index {
                signal = received;
            } else {
                interference += received;
            }
        }
    }
    let sinr = signal / (interference + noise);
    Some(if sinr.is_finite() { sinr.ln_1p() / std::f64::consts::LN_2 } else { f64::INFINITY })
}

/// Monte Carlo estimate of the average spectral efficiency in `mode`.
/// Replicates without coverage count as zero rate.
pub fn estimate_rate(scenario: &Scenario, sim: &SimConfig, mode: RateMode) -> Result<RateEstimate> {
    sim.validate()?;
    let rates: Vec<Option<f64>> = (0..sim.num_realizations as u64)
        .into_par_iter()
        .map(|i| realization_rate(&sample_network(scenario, sim, i), scenario, mode))
        .collect();
    let uncovered = rates.iter().filter(|r| r.is_none()).count();
    let values: Vec<f64> = rates.iter().map(|r| r.unwrap_or(0.0)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical(
            format!("estimate_rate ({})", mode.label()),
            "infinite SINR: no noise and no interference",
        ));
    }
    let (mean, stderr) = mean_and_stderr(&values);
    Ok(RateEstimate {
        mean,
        stderr,
        no_coverage_fraction: uncovered as f64 / values.len() as f64,
        realizations: values.len(),
    })
}

/// Smallest path loss of `set` in each replicate (`None` without coverage).
/// Only the association window is drawn; realizations are nested in the
/// radius, so this is the window's own draw up to a `1e-6` void tail.
pub fn sample_min_pathloss(scenario: &Scenario, sim: &SimConfig, set: AssociationSet) -> Vec<Option<f64>> {
    let radius = sim.window_radius.min(association_window_radius(scenario));
    (0..sim.num_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let realization = sample_within(scenario, sim, i, radius);
            min_pathloss(&realization, set, scenario.path_loss()).map(|a| a.path_loss)
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// `cdf`. Missing samples sit at `+inf`, where the reference CDF is taken as
/// `cdf(inf)`.
pub fn ks_distance(samples: &[Option<f64>], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len() as f64;
    let mut finite: Vec<f64> = samples.iter().flatten().copied().collect();
    finite.sort_by(f64::total_cmp);
    let mut worst: f64 = 0.0;
    for (i, &x) in finite.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    worst.max((cdf(f64::INFINITY) - finite.len() as f64 / n).abs())
}

/// Which interferers enter an empirical MGF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MgfTarget {
    /// One operator's BSs of one state, unit weights.
    Component(OperatorId, LinkState),
    /// All of one operator's BSs, unit weights.
    NonSharing(OperatorId),
    /// Both operators, each BS weighted by its operator's power.
    Sharing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Empirical `E[exp(-z I)]` with `I = sum w_n g_n / L_n` over the target's
/// BSs whose path loss is at least `x`. Dropping the closer points of a PPP
/// is the same as conditioning on their absence.
pub fn estimate_interference_mgf(
    scenario: &Scenario,
    sim: &SimConfig,
    target: MgfTarget,
    z: f64,
    x: f64,
) -> Result<MgfEstimate> {
    sim.validate()?;
    if !(z >= 0.0 && x > 0.0) {
        return Err(Error::domain("estimate_interference_mgf", "need z >= 0 and x > 0"));
    }
    let pl = scenario.path_loss();
    let values: Vec<f64> = (0..sim.num_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let realization = sample_network(scenario, sim, i);
            let mut interference = 0.0;
            for op in OperatorId::ALL {
                let (weight, state) = match target {
                    MgfTarget::Component(o, s) if o == op => (1.0, Some(s)),
                    MgfTarget::NonSharing(o) if o == op => (1.0, None),
                    MgfTarget::Sharing => (scenario.operator(op).power(), None),
                    _ => continue,
                };
                for bs in realization.operator(op) {
                    if state.is_some_and(|s| s != bs.state) {
                        continue;
                    }
                    let l = bs_path_loss(pl, bs);
                    if l >= x {
                        interference += weight * bs.fading_gain / l;
                    }
                }
            }
            (-z * interference).exp()
        })
        .collect();
    let (mean, stderr) = mean_and_stderr(&values);
    Ok(MgfEstimate { mean, stderr })
}
