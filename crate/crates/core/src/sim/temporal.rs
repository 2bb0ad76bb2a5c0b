//! Time-domain closed loop with a constant spacing or headway policy, used as
//! the comparison baseline.
//!
//! Stacked state: `[s₀, v₀, a₀, s₁, v₁, a₁, …]` over time `t`.

use crate::controller::{headway_controls_into, ControllerGains};
use crate::error::{Error, Result};
use crate::sim::rk4::Rk4;
use crate::sim::scenario::{gen_initial_conditions, ScenarioConfig};
use crate::sim::trajectory::{Domain, Sample, Trajectory};
use crate::spacing::{Policy, PolicyParams, TimeErrorTerms};
use crate::vehicle::{time_rhs, VehicleStateTime};

struct TemporalLoop<'a> {
    cfg: &'a ScenarioConfig,
    policy: PolicyParams,
    gains: ControllerGains,
    vehicles: Vec<VehicleStateTime>,
    terms: Vec<TimeErrorTerms>,
    inputs: Vec<f64>,
}

impl<'a> TemporalLoop<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.domain != Domain::Temporal {
            return Err(Error::InvalidParameter(
                "run_temporal needs domain = temporal".into(),
            ));
        }
        if matches!(cfg.policy.policy, Policy::DelayBased { .. }) {
            return Err(Error::InvalidParameter(
                "temporal runs need a constant spacing or constant headway policy".into(),
            ));
        }
        // κ (m) and the gains are given in spatial units; at cruise speed
        // v_nom one metre corresponds to 1/v_nom seconds.
        let v_nom = cfg.profile.nominal_velocity();
        let policy = PolicyParams::new(
            cfg.policy.policy,
            cfg.policy.kappa / v_nom,
            cfg.policy.kappa0,
        )?;
        let n = cfg.n_vehicles();
        Ok(Self {
            cfg,
            policy,
            gains: cfg.gains.for_time_domain(v_nom)?,
            vehicles: vec![VehicleStateTime::default(); n],
            terms: Vec::with_capacity(n),
            inputs: Vec::with_capacity(n),
        })
    }

    /// Vehicles spaced at the desired gap behind the leader, moving at the
    /// reference velocity, plus the seeded perturbations (timing offsets
    /// become position offsets of `-v·δt`).
    fn initial_state(&self) -> Result<Vec<f64>> {
        let cfg = self.cfg;
        let (d, h) = match cfg.policy.policy {
            Policy::ConstantSpacing { d } => (d, 0.0),
            Policy::ConstantHeadway { d, h } => (d, h),
            Policy::DelayBased { .. } => unreachable!("rejected in new"),
        };
        let perturb = gen_initial_conditions(cfg.seed, cfg.n_vehicles(), &cfg.ic_spread)?;
        let mut state = Vec::with_capacity(3 * perturb.len());
        let mut s_eq = cfg.lead_start;
        for (i, p) in perturb.iter().enumerate() {
            if i > 0 {
                s_eq -= d + h * cfg.profile.eval_vref(s_eq);
            }
            let v = cfg.profile.eval_vref(s_eq);
            state.extend([
                s_eq - v * p.timing,
                v + p.velocity,
                cfg.profile.equilibrium_accel(s_eq) + p.accel,
            ]);
        }
        Ok(state)
    }

    fn evaluate(&mut self, state: &[f64]) -> Result<()> {
        for (x, chunk) in self.vehicles.iter_mut().zip(state.chunks_exact(3)) {
            *x = VehicleStateTime {
                s: chunk[0],
                v: chunk[1],
                a: chunk[2],
            };
        }
        headway_controls_into(
            &self.vehicles,
            &self.cfg.profile,
            &self.gains,
            &self.policy,
            &self.cfg.vehicle,
            &mut self.terms,
            &mut self.inputs,
        )
    }

    fn rhs(&mut self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        self.evaluate(state)?;
        for (i, (x, d)) in self
            .vehicles
            .iter()
            .zip(out.chunks_exact_mut(3))
            .enumerate()
        {
            let w = self.cfg.disturbance.value(i, t);
            let dx = time_rhs(x, self.inputs[i], w, &self.cfg.vehicle);
            d.copy_from_slice(&[dx.s, dx.v, dx.a]);
        }
        Ok(())
    }

    fn record(&mut self, t: f64, state: &[f64], samples: &mut Vec<Sample>) -> Result<()> {
        self.evaluate(state)?;
        samples.clear();
        for (i, (x, term)) in self.vehicles.iter().zip(&self.terms).enumerate() {
            let e = &term.errors;
            samples.push(Sample {
                t,
                s: x.s,
                v: x.v,
                a: x.a,
                u: self.inputs[i],
                w: self.cfg.disturbance.value(i, t),
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

/// Integrates the headway-controlled platoon over time with fixed-step RK4.
pub fn run_temporal(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let mut plant = TemporalLoop::new(cfg)?;
    let mut state = plant.initial_state()?;
    let mut rk4 = Rk4::new(state.len());
    let mut samples = Vec::with_capacity(cfg.n_vehicles());
    let grid = cfg.grid;
    let mut traj = Trajectory::new(Domain::Temporal, cfg.n_vehicles(), grid.len());
    for k in 0..=grid.steps() {
        let t = grid.point(k);
        plant.record(t, &state, &mut samples)?;
        traj.push(t, &samples);
        if k < grid.steps() {
            rk4.step(
                &mut |x, y: &[f64], dy: &mut [f64]| plant.rhs(x, y, dy),
                t,
                grid.step,
                &mut state,
            )?;
        }
    }
    Ok(traj)
}
