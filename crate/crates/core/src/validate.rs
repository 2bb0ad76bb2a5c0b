//! Built-in self checks behind `platoon validate`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::config::{ConfigFile, ReferenceType};
use crate::error::Result;
use crate::sim::rk4::{integrate_rk4, UniformGrid};
use crate::sim::spatial::run_spatial;
use crate::spacing::{check_prop1, PolicyParams};
use crate::stability::{
    check_l2_contraction, compose_cascade_bound, simulate_linear_cascade, simulate_reduced_chain,
    IssBoundSpec,
};
use crate::vehicle::{space_to_time_traj, time_to_space_traj};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Multiplies every integration step; values above 1 are a self-test.
    pub step_scale: f64,
    /// Leader weight for the platoon and chain checks; `None` runs 0, 0.1, 0.2.
    pub kappa0: Option<f64>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            step_scale: 1.0,
            kappa0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tol,
            pass: measured <= tol,
        }
    }

    fn failed(name: impl Into<String>, tol: f64) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            tol,
            pass: false,
        }
    }

    fn from_result(name: &str, tol: f64, r: Result<f64>) -> Self {
        match r {
            Ok(m) => Self::at_most(name, m, tol),
            Err(_) => Self::failed(name, tol),
        }
    }
}

fn decay_error(step: f64, horizon: f64) -> Result<f64> {
    let grid = UniformGrid::new(0.0, horizon, step)?;
    let out = integrate_rk4(
        |_, x: &[f64], dx: &mut [f64]| {
            dx[0] = -x[0] / 2.0;
            Ok(())
        },
        &[1.0],
        &grid,
    )?;
    Ok((out.last().unwrap()[0] - (-horizon / 2.0).exp()).abs())
}

fn dip_config(kappa0: f64, step: f64) -> ConfigFile {
    let mut cfg = ConfigFile::default();
    cfg.reference.kind = ReferenceType::CosineDip;
    cfg.policy.kappa0 = kappa0;
    cfg.sim.s_end = 1500.0;
    cfg.sim.step = Some(step);
    cfg.sim.ic_spread_timing = 0.5;
    cfg.sim.ic_spread_velocity = 1.0;
    cfg
}

/// Largest relative change of the recorded `t` and `v` when the step is halved.
fn step_refinement(kappa0: f64, step: f64) -> Result<f64> {
    let coarse = run_spatial(&dip_config(kappa0, step).scenario()?)?;
    let fine = run_spatial(&dip_config(kappa0, step / 2.0).scenario()?)?;
    let mut worst = 0.0f64;
    for (c, f) in coarse.vehicles.iter().zip(&fine.vehicles) {
        for k in 0..c.len() {
            for (a, b) in [(c.t[k], f.t[2 * k]), (c.v[k], f.v[2 * k])] {
                let rel = (a - b).abs() / b.abs().max(1.0);
                worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
            }
        }
    }
    Ok(worst)
}

/// Delay-based run: the space/time equivalence holds on the converged tail,
/// and a space -> time -> space resampling across the dip reproduces the
/// velocities.
fn prop1_round_trip(kappa0: f64, step: f64) -> Result<(bool, f64, f64)> {
    let traj = run_spatial(&dip_config(kappa0, step).scenario()?)?;
    let report = check_prop1(&traj.segment(900.0, 1500.0), 1.0, 1e-3);
    let window = traj.segment(250.0, 650.0);
    let (t_lo, t_hi) = window
        .vehicles
        .iter()
        .fold((f64::MIN, f64::MAX), |(lo, hi), v| {
            (lo.max(v.t[0]), hi.min(*v.t.last().unwrap()))
        });
    let time = space_to_time_traj(&window, &UniformGrid::new(t_lo, t_hi, 0.01)?)?;
    let s_lo = time
        .vehicles
        .iter()
        .fold(f64::MIN, |m, v| m.max(v.s[0]))
        .ceil();
    let s_hi = time
        .vehicles
        .iter()
        .fold(f64::MAX, |m, v| m.min(*v.s.last().unwrap()))
        .floor();
    let back = time_to_space_traj(&time, &UniformGrid::new(s_lo, s_hi, 1.0)?)?;
    let mut worst = 0.0f64;
    for (orig, again) in window.vehicles.iter().zip(&back.vehicles) {
        for (k, s) in back.grid.iter().enumerate() {
            let j = ((s - window.grid[0]) / step).round() as usize;
            worst = worst.max((orig.v[j] - again.v[k]).abs());
        }
    }
    Ok((report.passes(), report.max_timing(), worst))
}

fn chain_analytic(step: f64) -> Result<f64> {
    let p = PolicyParams::delay_based(1.0, 2.0, 0.1)?;
    let grid = UniformGrid::new(0.0, 20.0, step)?;
    let chain = simulate_reduced_chain(1, &p, &[1.0, 0.0], &grid)?;
    let mut worst = 0.0f64;
    for (k, s) in chain.grid.iter().enumerate() {
        let lead = (-s / 2.0).exp();
        worst = worst.max((chain.deltas[0][k] - lead).abs());
        worst = worst.max((chain.deltas[1][k] - 0.9 * s / 2.0 * lead).abs());
    }
    Ok(worst)
}

/// Worst excess of `(ratio - (1-κ₀)²)`, so the pass condition is `≤ 1e-6`.
fn l2_excess(kappa0: f64, step: f64) -> Result<f64> {
    let p = PolicyParams::delay_based(1.0, 2.0, kappa0)?;
    let mut init = vec![0.0; 11];
    init[0] = 1.0;
    let chain = simulate_reduced_chain(10, &p, &init, &UniformGrid::new(0.0, 2000.0, step)?)?;
    let r = check_l2_contraction(&chain, kappa0)?;
    Ok((r.max_ratio().max(r.worst_intermediate) - r.bound).max(0.0))
}

/// Worst `sim - bound` over random contractive cascades.
fn cascade_soundness(step: f64) -> Result<f64> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(2024);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let gamma = 0.95 * unit();
        let n = 1 + (unit() * 60.0) as usize;
        let w = unit();
        let x0: Vec<f64> = (0..=n).map(|_| unit() * 2.0 - 1.0).collect();
        let x0_bound = x0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let spec = IssBoundSpec::new(1.0, 1.0, gamma, 1.0)?;
        let bound = compose_cascade_bound(&spec, x0_bound, w)?;
        let run =
            simulate_linear_cascade(gamma, n, |i, t| w * ((i as f64) + t).sin(), &x0, 20.0, step)?;
        for m in run.sup_norms {
            worst = worst.max(m - bound);
        }
    }
    Ok(worst.max(0.0))
}

pub fn run_validation(opts: &ValidateOptions) -> Vec<Check> {
    let scale = opts.step_scale;
    let kappa0s = opts.kappa0.map_or_else(|| vec![0.0, 0.1, 0.2], |k| vec![k]);
    let platoon_kappa0 = opts.kappa0.unwrap_or(0.1);
    let mut checks = vec![
        Check::from_result(
            "rk4 exponential decay at s = 2",
            1e-8,
            decay_error(0.01 * scale, 2.0),
        ),
        match (decay_error(0.4 * scale, 8.0), decay_error(0.2 * scale, 8.0)) {
            (Ok(a), Ok(b)) => {
                let ratio = a / b;
                Check {
                    name: "rk4 step-halving error ratio in [12, 20]".into(),
                    measured: ratio,
                    tol: 20.0,
                    pass: (12.0..=20.0).contains(&ratio),
                }
            }
            _ => Check::failed("rk4 step-halving error ratio in [12, 20]", 20.0),
        },
        Check::from_result(
            "platoon step refinement (relative)",
            1e-6,
            step_refinement(platoon_kappa0, 0.1 * scale),
        ),
    ];
    match prop1_round_trip(platoon_kappa0, 0.1 * scale) {
        Ok((holds, timing, dev)) => {
            checks.push(Check {
                name: "space/time equivalence on converged tail (timing error, s)".into(),
                measured: timing,
                tol: 1e-3,
                pass: holds,
            });
            checks.push(Check::at_most(
                "space -> time -> space velocity round trip",
                dev,
                1e-6,
            ));
        }
        Err(_) => checks.push(Check::failed(
            "space/time equivalence on converged tail (timing error, s)",
            1e-3,
        )),
    }
    checks.push(Check::from_result(
        "reduced chain vs closed form",
        1e-8,
        chain_analytic(0.01 * scale),
    ));
    for k in kappa0s {
        checks.push(Check::from_result(
            &format!("L2 contraction excess, kappa0 = {k}"),
            1e-6,
            l2_excess(k, 0.01 * scale),
        ));
    }
    checks.push(Check::from_result(
        "cascade bound soundness (sim - bound)",
        1e-9,
        cascade_soundness(0.01 * scale),
    ));
    checks
}
