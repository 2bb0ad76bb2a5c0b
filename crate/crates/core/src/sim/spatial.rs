//! Spatial-domain closed loop of the delay-based platoon.
//!
//! Stacked state: `[T_ref, t₀, v₀, a₀, t₁, v₁, a₁, …]` over position `s`.

use crate::controller::{spatial_control, Coupling};
use crate::error::{Error, Result};
use crate::sim::rk4::Rk4;
use crate::sim::scenario::{gen_initial_conditions, ScenarioConfig};
use crate::sim::trajectory::{Domain, Sample, Trajectory};
use crate::spacing::{compute_errors_spatial_into, Policy, TimingErrors};
use crate::vehicle::{space_rhs_checked, VehicleStateSpace};

pub(crate) struct SpatialLoop<'a> {
    cfg: &'a ScenarioConfig,
    vehicles: Vec<VehicleStateSpace>,
    errors: Vec<TimingErrors>,
    inputs: Vec<f64>,
}

impl<'a> SpatialLoop<'a> {
    pub(crate) fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.domain != crate::sim::Domain::Spatial {
            return Err(Error::InvalidParameter(
                "run_spatial needs domain = spatial".into(),
            ));
        }
        if !matches!(cfg.policy.policy, Policy::DelayBased { .. }) {
            return Err(Error::InvalidParameter(
                "spatial runs need the delay-based policy".into(),
            ));
        }
        let n = cfg.n_vehicles();
        Ok(Self {
            cfg,
            vehicles: vec![VehicleStateSpace::default(); n],
            errors: Vec::with_capacity(n),
            inputs: vec![0.0; n],
        })
    }

    /// Equilibrium at the grid start plus the seeded perturbations.
    pub(crate) fn initial_state(&self) -> Result<Vec<f64>> {
        let cfg = self.cfg;
        let dt = cfg.policy.time_gap()?;
        let s0 = cfg.grid.start;
        let v_eq = cfg.profile.eval_vref(s0);
        let a_eq = cfg.profile.equilibrium_accel(s0);
        let perturb = gen_initial_conditions(cfg.seed, cfg.n_vehicles(), &cfg.ic_spread)?;
        let mut state = Vec::with_capacity(1 + 3 * perturb.len());
        state.push(0.0);
        for (i, p) in perturb.iter().enumerate() {
            state.extend([i as f64 * dt + p.timing, v_eq + p.velocity, a_eq + p.accel]);
        }
        Ok(state)
    }

    /// Fills errors and control inputs for the stacked `state` at `s`.
    fn evaluate(&mut self, s: f64, state: &[f64]) -> Result<()> {
        for (x, chunk) in self.vehicles.iter_mut().zip(state[1..].chunks_exact(3)) {
            *x = VehicleStateSpace {
                t: chunk[0],
                v: chunk[1],
                a: chunk[2],
            };
        }
        let cfg = self.cfg;
        compute_errors_spatial_into(
            &self.vehicles,
            state[0],
            s,
            &cfg.profile,
            &cfg.policy,
            &mut self.errors,
        )?;
        let inv_vref = cfg.profile.eval_inv_vref_derivs(s);
        let lead = &self.vehicles[0];
        for (i, (x, e)) in self.vehicles.iter().zip(&self.errors).enumerate() {
            let coupling = if i == 0 {
                Coupling::Leader
            } else {
                Coupling::Follower {
                    predecessor: &self.vehicles[i - 1],
                    leader: lead,
                }
            };
            self.inputs[i] = spatial_control(
                e,
                x,
                coupling,
                &inv_vref,
                &cfg.gains,
                &cfg.policy,
                &cfg.vehicle,
            );
        }
        Ok(())
    }

    fn rhs(&mut self, s: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        self.evaluate(s, state)?;
        out[0] = 1.0 / self.cfg.profile.eval_vref(s);
        for (i, (x, d)) in self
            .vehicles
            .iter()
            .zip(out[1..].chunks_exact_mut(3))
            .enumerate()
        {
            let w = self.cfg.disturbance.value(i, s);
            let dx = space_rhs_checked(x, self.inputs[i], w, &self.cfg.vehicle, i, s)?;
            d.copy_from_slice(&[dx.t, dx.v, dx.a]);
        }
        Ok(())
    }

    fn record(&mut self, s: f64, state: &[f64], samples: &mut Vec<Sample>) -> Result<()> {
        self.evaluate(s, state)?;
        samples.clear();
        for (i, (x, e)) in self.vehicles.iter().zip(&self.errors).enumerate() {
            samples.push(Sample {
                t: x.t,
                s,
                v: x.v,
                a: x.a,
                u: self.inputs[i],
                w: self.cfg.disturbance.value(i, s),
                delta: e.delta,
                delta0: e.delta0,
                delta1: e.delta1,
                delta2: e.delta2,
                e1: e.e1,
                e2: e.e2,
                y: e.y,
            });
        }
        Ok(())
    }
}

/// Integrates the platoon over the spatial grid, handing every recorded grid
/// point to `observe` instead of storing it.
pub fn run_spatial_observed(
    cfg: &ScenarioConfig,
    observe: impl FnMut(f64, &[Sample]),
) -> Result<()> {
    let plant = SpatialLoop::new(cfg)?;
    let state = plant.initial_state()?;
    integrate(plant, state, observe)
}

/// Integrates the delay-based platoon over position with fixed-step RK4.
pub fn run_spatial(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let mut traj = Trajectory::new(Domain::Spatial, cfg.n_vehicles(), cfg.grid.len());
    run_spatial_observed(cfg, |s, samples| traj.push(s, samples))?;
    Ok(traj)
}

/// Like [`run_spatial`], but starting from explicit vehicle states instead of
/// the seeded perturbations; the reference clock starts at zero.
pub fn run_spatial_from(cfg: &ScenarioConfig, initial: &[VehicleStateSpace]) -> Result<Trajectory> {
    let plant = SpatialLoop::new(cfg)?;
    if initial.len() != cfg.n_vehicles() {
        return Err(Error::InvalidParameter(format!(
            "need {} initial vehicle states, got {}",
            cfg.n_vehicles(),
            initial.len()
        )));
    }
    let mut state = Vec::with_capacity(1 + 3 * initial.len());
    state.push(0.0);
    for x in initial {
        state.extend([x.t, x.v, x.a]);
    }
    let mut traj = Trajectory::new(Domain::Spatial, cfg.n_vehicles(), cfg.grid.len());
    integrate(plant, state, |s, samples| traj.push(s, samples))?;
    Ok(traj)
}

fn integrate(
    mut plant: SpatialLoop<'_>,
    mut state: Vec<f64>,
    mut observe: impl FnMut(f64, &[Sample]),
) -> Result<()> {
    let grid = plant.cfg.grid;
    let mut rk4 = Rk4::new(state.len());
    let mut samples = Vec::with_capacity(plant.vehicles.len());
    for k in 0..=grid.steps() {
        let s = grid.point(k);
        plant.record(s, &state, &mut samples)?;
        observe(s, &samples);
        if k < grid.steps() {
            rk4.step(
                &mut |x, y: &[f64], dy: &mut [f64]| plant.rhs(x, y, dy),
                s,
                grid.step,
                &mut state,
            )?;
        }
    }
    Ok(())
}
