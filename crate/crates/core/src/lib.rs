//! Two-stage computing-resource allocation for mobile edge computing networks.
//!
//! Stage one picks base-station transmit powers by maximizing the potential of
//! an exact potential game with particle swarm optimization ([`pso`] over
//! [`game`]). Stage two shares a single MEC server among the stations by
//! solving a small linear program ([`allocation`]). Demand for compute comes
//! from the coverage-radius distribution of a fading channel ([`netmodel`],
//! [`demand`]). [`experiment`] sweeps BS density and path-loss exponent and
//! writes the results.
//!
//! The model is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases below fix it to `f64`, which the experiment layer
//! uses throughout.

// `!(x > 0)` guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod demand;
mod error;
pub mod experiment;
pub mod game;
pub mod netmodel;
pub mod pso;
pub mod quadrature;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use allocation::{allocate_capped_equal, allocate_equal, allocate_lp, Scheme};
pub use demand::{demand_delta, kernel_integral, max_compute, required_compute};
pub use experiment::{make_grid_scenario, run_sweep, ExperimentConfig, SweepRecord};
pub use game::{potential, utility, verify_exact_potential};
pub use netmodel::{
    coverage_probability, coverage_radius, interference_at, radius_cdf, radius_pdf, sinr,
};

pub type ChannelParams = netmodel::ChannelParams<f64>;
pub type ScenarioParams = netmodel::ScenarioParams<f64>;
pub type NetworkScenario = netmodel::NetworkScenario<f64>;
pub type PowerProfile = netmodel::PowerProfile<f64>;
pub type DemandProfile = demand::DemandProfile<f64>;
pub type GameEvaluation = game::GameEvaluation<f64>;
pub type AllocationResult = allocation::AllocationResult<f64>;
pub type PsoConfig = pso::PsoConfig<f64>;
pub type PsoState = pso::PsoState<f64>;
pub type PsoOutcome = pso::PsoOutcome<f64>;
