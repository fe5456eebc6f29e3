//! Domain parameters of a two-operator downlink deployment.
//!
//! Every type here is an immutable value object: constructors validate the
//! invariants once and the accessors never fail afterwards. Units are SI
//! throughout (meters, hertz, watts, BS per square meter); the noise figure is
//! the only quantity carried in decibels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise power spectral density at room temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkState {
    Los,
    Nlos,
}

impl LinkState {
    pub const ALL: [LinkState; 2] = [LinkState::Los, LinkState::Nlos];

    pub fn label(self) -> &'static str {
        match self {
            LinkState::Los => "LOS",
            LinkState::Nlos => "NLOS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorId {
    One,
    Two,
}

impl OperatorId {
    pub const ALL: [OperatorId; 2] = [OperatorId::One, OperatorId::Two];

    pub fn other(self) -> OperatorId {
        match self {
            OperatorId::One => OperatorId::Two,
            OperatorId::Two => OperatorId::One,
        }
    }

    /// Zero-based slot, for indexing per-operator arrays.
    pub fn slot(self) -> usize {
        match self {
            OperatorId::One => 0,
            OperatorId::Two => 1,
        }
    }

    /// One-based operator number as used in reports.
    pub fn number(self) -> u8 {
        self.slot() as u8 + 1
    }
}

fn check_probability(field: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::invalid(field, format!("{value} is not a probability in [0, 1]")));
    }
    Ok(())
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::invalid(field, format!("{value} must be finite and > 0")));
    }
    Ok(())
}

fn check_nonnegative(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::invalid(field, format!("{value} must be finite and >= 0")));
    }
    Ok(())
}

/// Two-ball LOS/NLOS link-state model: a link shorter than `D` is LOS with
/// probability `q_los_inner`, a longer one with probability `q_los_outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStateModel {
    q_los_inner: f64,
    q_los_outer: f64,
    ball_radius_d: f64,
}

impl LinkStateModel {
    pub fn new(q_los_inner: f64, q_los_outer: f64, ball_radius_d: f64) -> Result<Self> {
        check_probability("q_los_inner", q_los_inner)?;
        check_probability("q_los_outer", q_los_outer)?;
        check_positive("ball_radius_d", ball_radius_d)?;
        Ok(Self {
            q_los_inner,
            q_los_outer,
            ball_radius_d,
        })
    }

    pub fn q_los_inner(&self) -> f64 {
        self.q_los_inner
    }

    pub fn q_los_outer(&self) -> f64 {
        self.q_los_outer
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius_d
    }

    /// Probability of `state` for links inside the ball, `q_S^[0,D)`.
    pub fn q_inner(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.q_los_inner,
            LinkState::Nlos => 1.0 - self.q_los_inner,
        }
    }

    /// Probability of `state` for links outside the ball, `q_S^[D,inf)`.
    pub fn q_outer(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.q_los_outer,
            LinkState::Nlos => 1.0 - self.q_los_outer,
        }
    }

    /// LOS probability of a link of length `r`. The boundary `r = D` belongs
    /// to the outer region.
    pub fn los_probability(&self, r: f64) -> Result<f64> {
        self.state_probability(r, LinkState::Los)
    }

    pub fn state_probability(&self, r: f64, state: LinkState) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("link_state_prob", format!("distance {r} < 0")));
        }
        Ok(if r < self.ball_radius_d {
            self.q_inner(state)
        } else {
            self.q_outer(state)
        })
    }
}

/// Path loss `l_S(r) = k r^alpha_S` for the two link states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    k: f64,
    alpha_los: f64,
    alpha_nlos: f64,
}

impl PathLossParams {
    /// Validates `k > 0`, both exponents `> 2`, and `alpha_nlos >= alpha_los`.
    pub fn new(k: f64, alpha_los: f64, alpha_nlos: f64) -> Result<Self> {
        let params = Self::new_unordered(k, alpha_los, alpha_nlos)?;
        if alpha_nlos < alpha_los {
            return Err(Error::invalid(
                "alpha_nlos",
                format!("NLOS exponent {alpha_nlos} is below the LOS exponent {alpha_los}"),
            ));
        }
        Ok(params)
    }

    /// Like [`PathLossParams::new`] but without the exponent ordering check.
    pub fn new_unordered(k: f64, alpha_los: f64, alpha_nlos: f64) -> Result<Self> {
        check_positive("k", k)?;
        for (field, alpha) in [("alpha_los", alpha_los), ("alpha_nlos", alpha_nlos)] {
            if !(alpha.is_finite() && alpha > 2.0) {
                return Err(Error::invalid(field, format!("exponent {alpha} must be > 2")));
            }
        }
        Ok(Self {
            k,
            alpha_los,
            alpha_nlos,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self, state: LinkState) -> f64 {
        match state {
            LinkState::Los => self.alpha_los,
            LinkState::Nlos => self.alpha_nlos,
        }
    }

    pub fn path_loss(&self, r: f64, state: LinkState) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("path_loss", format!("distance {r} < 0")));
        }
        Ok(self.k * r.powf(self.alpha(state)))
    }

    /// Path loss at which a `state` link crosses the ball boundary, `k D^alpha_S`.
    pub fn breakpoint(&self, state: LinkState, ball_radius: f64) -> f64 {
        self.k * ball_radius.powf(self.alpha(state))
    }
}

/// Free-space path-loss constant `(4 pi f_c / c)^2`.
pub fn pathloss_constant(carrier_freq: f64) -> f64 {
    let ratio = 4.0 * std::f64::consts::PI * carrier_freq / SPEED_OF_LIGHT;
    ratio * ratio
}

/// Thermal noise power in watts over `bandwidth` Hz with the given noise
/// figure: `-174 dBm/Hz + 10 log10(W) + NF`, converted from dBm.
pub fn noise_power(bandwidth: f64, noise_figure_db: f64) -> f64 {
    if bandwidth == 0.0 {
        return 0.0;
    }
    let dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth.log10() + noise_figure_db;
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Deployment parameters of one operator.
///
/// Zero density, bandwidth or power are accepted so that an operator can be
/// switched off when checking the single-operator limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    density_lambda: f64,
    bandwidth_w: f64,
    power_p: f64,
    noise_figure_nf: f64,
}

impl OperatorParams {
    pub fn new(density: f64, bandwidth: f64, power: f64, noise_figure_db: f64) -> Result<Self> {
        check_nonnegative("density_lambda", density)?;
        check_nonnegative("bandwidth_w", bandwidth)?;
        check_nonnegative("power_p", power)?;
        check_nonnegative("noise_figure_nf", noise_figure_db)?;
        Ok(Self {
            density_lambda: density,
            bandwidth_w: bandwidth,
            power_p: power,
            noise_figure_nf: noise_figure_db,
        })
    }

    pub fn density(&self) -> f64 {
        self.density_lambda
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth_w
    }

    pub fn power(&self) -> f64 {
        self.power_p
    }

    pub fn noise_figure(&self) -> f64 {
        self.noise_figure_nf
    }

    /// Noise power over this operator's own bandwidth, watts.
    pub fn noise_power(&self) -> f64 {
        noise_power(self.bandwidth_w, self.noise_figure_nf)
    }

    pub fn with_density(self, density: f64) -> Result<Self> {
        Self::new(density, self.bandwidth_w, self.power_p, self.noise_figure_nf)
    }
}

/// Noise bandwidth used for a mobile served under spectrum sharing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharingNoise {
    /// Noise over the serving operator's own bandwidth `W_i`.
    #[default]
    PerOperator,
    /// Noise over the pooled bandwidth `W_1 + W_2`.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    op1: OperatorParams,
    op2: OperatorParams,
    link_state: LinkStateModel,
    path_loss: PathLossParams,
    carrier_freq_fc: f64,
    sharing_noise: SharingNoise,
}

impl Scenario {
    pub fn new(
        op1: OperatorParams,
        op2: OperatorParams,
        link_state: LinkStateModel,
        path_loss: PathLossParams,
        carrier_freq: f64,
    ) -> Result<Self> {
        check_positive("carrier_freq_fc", carrier_freq)?;
        Ok(Self {
            op1,
            op2,
            link_state,
            path_loss,
            carrier_freq_fc: carrier_freq,
            sharing_noise: SharingNoise::default(),
        })
    }

    pub fn with_sharing_noise(mut self, mode: SharingNoise) -> Self {
        self.sharing_noise = mode;
        self
    }

    pub fn operator(&self, id: OperatorId) -> &OperatorParams {
        match id {
            OperatorId::One => &self.op1,
            OperatorId::Two => &self.op2,
        }
    }

    pub fn link_state(&self) -> &LinkStateModel {
        &self.link_state
    }

    pub fn path_loss(&self) -> &PathLossParams {
        &self.path_loss
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq_fc
    }

    pub fn sharing_noise(&self) -> SharingNoise {
        self.sharing_noise
    }

    pub fn with_operator(mut self, id: OperatorId, params: OperatorParams) -> Self {
        match id {
            OperatorId::One => self.op1 = params,
            OperatorId::Two => self.op2 = params,
        }
        self
    }

    pub fn with_densities(self, density1: f64, density2: f64) -> Result<Self> {
        let op1 = self.op1.with_density(density1)?;
        let op2 = self.op2.with_density(density2)?;
        Ok(self
            .with_operator(OperatorId::One, op1)
            .with_operator(OperatorId::Two, op2))
    }

    /// The same deployment with the operator labels exchanged.
    pub fn swapped(mut self) -> Self {
        std::mem::swap(&mut self.op1, &mut self.op2);
        self
    }

    /// Noise power seen by a mobile served by `serving` without sharing.
    pub fn noise_power(&self, serving: OperatorId) -> f64 {
        self.operator(serving).noise_power()
    }

    /// Noise power seen by a mobile served by `serving` under sharing.
    pub fn sharing_noise_power(&self, serving: OperatorId) -> f64 {
        match self.sharing_noise {
            SharingNoise::PerOperator => self.noise_power(serving),
            SharingNoise::Combined => noise_power(
                self.op1.bandwidth() + self.op2.bandwidth(),
                self.operator(serving).noise_figure(),
            ),
        }
    }
}
