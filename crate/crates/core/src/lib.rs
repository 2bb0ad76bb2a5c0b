//! Simulation and analysis of vehicle platoons under a delay-based spacing
//! policy, controlled in the spatial domain.
//!
//! Vehicles are third-order longitudinal models. With position `s` as the
//! independent variable, vehicle `i` tracks its predecessor's passage times
//! delayed by a fixed gap `Δt`, blended with the leader's by a weight `κ₀`.

// `!(x > 0.0)` rejects NaN on purpose; chain couplings index neighbours.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod controller;
pub mod error;
pub mod interp;
pub mod reference;
pub mod sim;
pub mod spacing;
pub mod stability;
pub mod validate;
pub mod vehicle;

pub use controller::{make_gains, ControllerGains};
pub use error::{Error, Result};
pub use reference::{ProfileKind, ReferenceProfile};
pub use sim::{run_spatial, run_temporal, Domain, ScenarioConfig, Trajectory};
pub use spacing::{Policy, PolicyParams};
pub use vehicle::VehicleParams;
