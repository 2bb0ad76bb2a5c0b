//! Fixed-step closed-loop platoon simulation.

pub mod rk4;
pub mod scenario;
pub mod spatial;
pub mod temporal;
pub mod trajectory;

pub use rk4::{integrate_rk4, Rk4, UniformGrid};
pub use scenario::{
    gen_initial_conditions, AppliesTo, DisturbanceKind, DisturbanceSpec, IcPerturbation, IcSpread,
    ScenarioConfig,
};
pub use spatial::{run_spatial, run_spatial_from, run_spatial_observed};
pub use temporal::run_temporal;
pub use trajectory::{Domain, Sample, Trajectory, VehicleSeries, CSV_HEADER};
