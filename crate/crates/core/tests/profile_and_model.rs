use approx::assert_relative_eq;
use proptest::prelude::*;

use platoon_core::reference::ReferenceProfile;
use platoon_core::sim::{Sample, Trajectory, UniformGrid};
use platoon_core::vehicle::{
    space_rhs, space_to_time_traj, time_rhs, time_to_space_traj, VehicleParams, VehicleStateSpace,
    VehicleStateTime,
};
use platoon_core::Domain;

fn dip() -> ReferenceProfile {
    ReferenceProfile::cosine_dip(20.0, 2.0, 300.0, 500.0).unwrap()
}

proptest! {
    #[test]
    fn inverse_derivatives_match_finite_differences(s in 301.0f64..499.0) {
        let p = dip();
        let h = 1e-3;
        let w = p.eval_inv_vref_derivs(s);
        let inv = |x: f64| 1.0 / p.eval_vref(x);
        let d1 = (inv(s + h) - inv(s - h)) / (2.0 * h);
        let d2 = (inv(s + h) - 2.0 * inv(s) + inv(s - h)) / (h * h);
        prop_assert!((w.w0 - inv(s)).abs() < 1e-15);
        prop_assert!((w.w1 - d1).abs() < 1e-10);
        prop_assert!((w.w2 - d2).abs() < 1e-7);
    }

    #[test]
    fn dip_stays_within_bounds(s in -1000.0f64..2000.0) {
        let p = dip();
        let v = p.eval_vref(s);
        prop_assert!(p.v_min() <= v && v <= p.v_max());
        prop_assert!((p.equilibrium_accel(s) - v * p.vref_derivs(s).1).abs() < 1e-15);
    }

    /// Dividing the time-domain field by v gives the spatial one.
    #[test]
    fn chain_rule_between_domains(
        v in 0.5f64..40.0, a in -3.0f64..3.0, u in -5.0f64..5.0, w in -1.0f64..1.0, tau in 0.2f64..3.0,
    ) {
        let p = VehicleParams::new(tau).unwrap();
        let dt = time_rhs(&VehicleStateTime { s: 0.0, v, a }, u, w, &p);
        let ds = space_rhs(&VehicleStateSpace { t: 0.0, v, a }, u, w, &p).unwrap();
        prop_assert!((ds.t - dt.s.recip()).abs() < 1e-14);
        prop_assert!((ds.v - dt.v / v).abs() < 1e-12);
        prop_assert!((ds.a - dt.a / v).abs() < 1e-12);
    }
}

#[test]
fn dip_is_c1_at_its_ends() {
    let p = dip();
    for edge in [300.0, 500.0] {
        let (v_in, dv_in, _) = p.vref_derivs(edge);
        let (v_out, dv_out, _) = p.vref_derivs(if edge == 300.0 {
            edge - 1e-9
        } else {
            edge + 1e-9
        });
        assert_relative_eq!(v_in, v_out, epsilon = 1e-9);
        assert!((dv_in - dv_out).abs() < 1e-9);
    }
    // Second derivative bounded on a fine grid.
    let peak = (0..=10_000)
        .map(|k| p.vref_derivs(250.0 + 0.03 * k as f64).2.abs())
        .fold(0.0, f64::max);
    assert!(peak <= 2.0 * (2.0 * std::f64::consts::PI / 200.0).powi(2) + 1e-12);
}

#[test]
fn tref_of_constant_profile_is_linear() {
    let p = ReferenceProfile::constant(20.0).unwrap();
    assert_relative_eq!(p.eval_tref(0.0, 1000.0, 0.1), 50.0, epsilon = 1e-10);
    // Across the dip the clock runs slower than at cruise speed.
    assert!(dip().eval_tref(0.0, 1000.0, 0.1) > 50.0);
}

fn cruise_trajectory(v: f64, a: f64, n: usize) -> Trajectory {
    let mut traj = Trajectory::new(Domain::Spatial, 1, n);
    for k in 0..n {
        let s = k as f64;
        // v(s) = sqrt(v0² + 2as) under constant acceleration.
        let vel = (v * v + 2.0 * a * s).sqrt();
        let t = (vel - v) / a;
        traj.push(
            s,
            &[Sample {
                t,
                s,
                v: vel,
                a,
                ..Default::default()
            }],
        );
    }
    traj
}

#[test]
fn space_time_resampling_round_trip() {
    let traj = cruise_trajectory(15.0, 0.5, 400);
    // Whole steps only: the grid's last point may otherwise overshoot the record.
    let t_end = (traj.vehicles[0].t[399] / 0.01).floor() * 0.01;
    let timed = space_to_time_traj(&traj, &UniformGrid::new(0.0, t_end, 0.01).unwrap()).unwrap();
    // In time, velocity is linear: v = v0 + a t.
    for (t, v) in timed.grid.iter().zip(&timed.vehicles[0].v) {
        assert!((v - (15.0 + 0.5 * t)).abs() < 1e-6);
    }
    let back = time_to_space_traj(&timed, &UniformGrid::new(10.0, 390.0, 0.5).unwrap()).unwrap();
    for (s, v) in back.grid.iter().zip(&back.vehicles[0].v) {
        assert!((v - (225.0 + s).sqrt()).abs() < 1e-6);
    }
}

#[test]
fn resampling_outside_the_record_fails() {
    let traj = cruise_trajectory(15.0, 0.5, 100);
    assert!(space_to_time_traj(&traj, &UniformGrid::new(0.0, 1e3, 1.0).unwrap()).is_err());
}
