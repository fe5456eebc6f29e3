//! Run configuration: a flat TOML file with dotted keys.
//!
//! Densities are given per km² and converted to per m² on the way in.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::montecarlo::SimConfig;
use crate::optimize::DensitySweep;
use crate::rate::QuadratureConfig;
use crate::scenario::{
    pathloss_constant, LinkStateModel, OperatorId, OperatorParams, PathLossParams, Scenario,
    SharingNoise,
};

pub const PER_KM2: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub carrier_freq_hz: f64,
    #[serde(default)]
    pub sharing_noise: SharingNoise,
    pub linkstate: LinkStateSection,
    pub pathloss: PathLossSection,
    pub operator1: OperatorSection,
    pub operator2: OperatorSection,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkStateSection {
    pub d_meters: f64,
    pub q_los_inner: f64,
    pub q_los_outer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossSection {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Overrides the free-space constant derived from the carrier frequency.
    #[serde(default)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub density_per_km2: f64,
    pub bandwidth_hz: f64,
    pub power_w: f64,
    pub noise_figure_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepChoice {
    #[default]
    Shared,
    Operator1,
    Operator2,
}

impl From<SweepChoice> for DensitySweep {
    fn from(choice: SweepChoice) -> Self {
        match choice {
            SweepChoice::Shared => DensitySweep::Shared,
            SweepChoice::Operator1 => DensitySweep::PerOperator(OperatorId::One),
            SweepChoice::Operator2 => DensitySweep::PerOperator(OperatorId::Two),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub lambda_min_per_km2: f64,
    pub lambda_max_per_km2: f64,
    pub grid_points: usize,
    pub refine_iters: usize,
    pub sweep: SweepChoice,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            lambda_min_per_km2: 1.0,
            lambda_max_per_km2: 1000.0,
            grid_points: 16,
            refine_iters: 30,
            sweep: SweepChoice::Shared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub realizations: usize,
    pub seed: u64,
    /// Defaults to a radius derived from the scenario.
    pub window_radius_m: Option<f64>,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            realizations: 10_000,
            seed: 1,
            window_radius_m: None,
        }
    }
}

fn operator(section: &OperatorSection) -> crate::Result<OperatorParams> {
    OperatorParams::new(
        section.density_per_km2 * PER_KM2,
        section.bandwidth_hz,
        section.power_w,
        section.noise_figure_db,
    )
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let build = || -> crate::Result<Scenario> {
            let ls = LinkStateModel::new(
                self.linkstate.q_los_inner,
                self.linkstate.q_los_outer,
                self.linkstate.d_meters,
            )?;
            let k = match self.pathloss.k {
                Some(k) => k,
                None => pathloss_constant(self.carrier_freq_hz),
            };
            let pl = PathLossParams::new(k, self.pathloss.alpha_los, self.pathloss.alpha_nlos)?;
            Ok(Scenario::new(
                operator(&self.operator1)?,
                operator(&self.operator2)?,
                ls,
                pl,
                self.carrier_freq_hz,
            )?
            .with_sharing_noise(self.sharing_noise))
        };
        build().map_err(CliError::from)
    }

    pub fn quadrature(&self) -> Result<QuadratureConfig, CliError> {
        self.quadrature.validate()?;
        Ok(self.quadrature)
    }

    pub fn simulation(&self, scenario: &Scenario) -> Result<SimConfig, CliError> {
        let sim = &self.simulation;
        let radius = sim
            .window_radius_m
            .unwrap_or_else(|| crate::montecarlo::default_window_radius(scenario));
        Ok(SimConfig::new(radius, sim.realizations, sim.seed)?)
    }
}
