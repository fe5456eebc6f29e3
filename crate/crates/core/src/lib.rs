//! Stochastic-geometry analysis of two-operator downlink cellular networks
//! with and without spectrum and infrastructure sharing.
//!
//! The analytic pipeline runs `scenario` → `intensity` → `interference` →
//! `rate`, with `optimize` sweeping the BS density on top. `montecarlo` is an
//! independent system-level simulator used to cross-check every analytic
//! quantity, and `cli` drives the `netshare` binary.

pub mod cli;
pub mod error;
pub mod intensity;
pub mod interference;
pub mod montecarlo;
pub mod optimize;
pub mod quadrature;
pub mod rate;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
pub use rate::{aggregate_rate, aggregate_rates, QuadratureConfig, RateReport, Setup};
pub use scenario::{
    LinkState, LinkStateModel, OperatorId, OperatorParams, PathLossParams, Scenario, SharingNoise,
};
