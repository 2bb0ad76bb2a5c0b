//! Spacing policies and the timing/velocity error coordinates built on them.
//!
//! Spatial domain (delay-based policy), for follower `i`:
//!
//! ```text
//! Δᵢ   = tᵢ - tᵢ₋₁ - Δt            Δᵢ⁰ = tᵢ - t₀ - iΔt
//! e₁ᵢ  = 1/vᵢ - 1/vref             e₂ᵢ = -aᵢ/vᵢ³ - d/ds(1/vref)
//! δ₁ᵢ  = (1-κ₀)Δᵢ + κ₀Δᵢ⁰ + κe₁ᵢ
//! δ₂ᵢ  = (1-κ₀)(e₁ᵢ - e₁ᵢ₋₁) + κ₀(e₁ᵢ - e₁₀) + κe₂ᵢ
//! yᵢ   = -κ₀Δᵢ⁰ - κe₁ᵢ = (1-κ₀)Δᵢ - δ₁ᵢ
//! ```
//!
//! The leader measures `Δ₀ = t₀ - T_ref(s)` against the integrated reference
//! clock, with `Δ₀⁰ = Δ₀`, `δ₁₀ = Δ₀ + κe₁₀` and `δ₂₀ = e₁₀ + κe₂₀`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::interp::MonotoneCubic;
use crate::reference::ReferenceProfile;
use crate::sim::trajectory::Trajectory;
use crate::vehicle::{VehicleStateSpace, VehicleStateTime, V_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Policy {
    /// Fixed distance `d` (m).
    ConstantSpacing { d: f64 },
    /// Distance `d + h v` (m, s).
    ConstantHeadway { d: f64, h: f64 },
    /// Follow the predecessor's trajectory delayed by `dt` (s).
    DelayBased { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub policy: Policy,
    /// Weight of the velocity error in `δ₁`.
    pub kappa: f64,
    /// Weight of the leader timing error, `0 ≤ κ₀ < 1`.
    pub kappa0: f64,
}

impl PolicyParams {
    pub fn new(policy: Policy, kappa: f64, kappa0: f64) -> Result<Self> {
        match policy {
            Policy::ConstantSpacing { d } => {
                ensure(d >= 0.0, || format!("d must be >= 0, got {d}"))?
            }
            Policy::ConstantHeadway { d, h } => {
                ensure(d >= 0.0, || format!("d must be >= 0, got {d}"))?;
                ensure(h > 0.0, || format!("h must be > 0, got {h}"))?;
            }
            Policy::DelayBased { dt } => ensure(dt > 0.0, || format!("dt must be > 0, got {dt}"))?,
        }
        ensure(kappa > 0.0 && kappa.is_finite(), || {
            format!("kappa must be > 0, got {kappa}")
        })?;
        ensure((0.0..1.0).contains(&kappa0), || {
            format!("kappa0 must lie in [0, 1), got {kappa0}")
        })?;
        Ok(Self {
            policy,
            kappa,
            kappa0,
        })
    }

    pub fn delay_based(dt: f64, kappa: f64, kappa0: f64) -> Result<Self> {
        Self::new(Policy::DelayBased { dt }, kappa, kappa0)
    }

    pub fn time_gap(&self) -> Result<f64> {
        match self.policy {
            Policy::DelayBased { dt } => Ok(dt),
            _ => Err(Error::InvalidParameter(
                "spatial error coordinates require the delay-based policy".into(),
            )),
        }
    }
}

/// Error coordinates of one vehicle at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimingErrors {
    pub delta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub e1: f64,
    pub e2: f64,
    pub y: f64,
}

/// Stacked spatial states of the platoon at position `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonState {
    pub s: f64,
    /// Reference clock `T_ref(s)`.
    pub t_ref: f64,
    pub vehicles: Vec<VehicleStateSpace>,
}

pub fn compute_errors_spatial(
    platoon: &PlatoonState,
    profile: &ReferenceProfile,
    params: &PolicyParams,
) -> Result<Vec<TimingErrors>> {
    let mut out = Vec::with_capacity(platoon.vehicles.len());
    compute_errors_spatial_into(
        &platoon.vehicles,
        platoon.t_ref,
        platoon.s,
        profile,
        params,
        &mut out,
    )?;
    Ok(out)
}

/// Allocation-free form of [`compute_errors_spatial`] used inside the integrator.
pub fn compute_errors_spatial_into(
    vehicles: &[VehicleStateSpace],
    t_ref: f64,
    s: f64,
    profile: &ReferenceProfile,
    params: &PolicyParams,
    out: &mut Vec<TimingErrors>,
) -> Result<()> {
    let dt = params.time_gap()?;
    let (kappa, kappa0) = (params.kappa, params.kappa0);
    let w = profile.eval_inv_vref_derivs(s);
    out.clear();
    let Some(lead) = vehicles.first() else {
        return Ok(());
    };
    for (i, x) in vehicles.iter().enumerate() {
        if !(x.v > V_FLOOR) {
            return Err(Error::NonPositiveVelocity {
                vehicle: i,
                position: s,
                velocity: x.v,
            });
        }
    }
    let e1_of = |x: &VehicleStateSpace| 1.0 / x.v - w.w0;
    let e2_of = |x: &VehicleStateSpace| -x.a / (x.v * x.v * x.v) - w.w1;

    let e1_lead = e1_of(lead);
    let e2_lead = e2_of(lead);
    let delta_lead = lead.t - t_ref;
    let delta1_lead = delta_lead + kappa * e1_lead;
    out.push(TimingErrors {
        delta: delta_lead,
        delta0: delta_lead,
        delta1: delta1_lead,
        delta2: e1_lead + kappa * e2_lead,
        e1: e1_lead,
        e2: e2_lead,
        y: -kappa0 * delta_lead - kappa * e1_lead,
    });

    let mut e1_prev = e1_lead;
    for (i, pair) in vehicles.windows(2).enumerate() {
        let (prev, x) = (&pair[0], &pair[1]);
        let idx = (i + 1) as f64;
        let e1 = e1_of(x);
        let e2 = e2_of(x);
        let delta = x.t - prev.t - dt;
        let delta0 = x.t - lead.t - idx * dt;
        out.push(TimingErrors {
            delta,
            delta0,
            delta1: (1.0 - kappa0) * delta + kappa0 * delta0 + kappa * e1,
            delta2: (1.0 - kappa0) * (e1 - e1_prev) + kappa0 * (e1 - e1_lead) + kappa * e2,
            e1,
            e2,
            y: -kappa0 * delta0 - kappa * e1,
        });
        e1_prev = e1;
    }
    Ok(())
}

/// Time-domain errors together with the drift of `δ₂` that does not depend
/// on the follower's own jerk; the headway controller cancels it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct TimeErrorTerms {
    pub errors: TimingErrors,
    /// `(1-κ₀)Δ̈ᵢ + κ₀Δ̈ᵢ⁰` with every acceleration taken as its current value.
    pub spacing_drift: f64,
}

/// Spacing error `Δᵢ(t) = sᵢ - sᵢ₋₁ + g(sᵢ)` with desired gap `g(s) = d + h vref(s)`
/// (`h = 0` for constant spacing), so that with `κ = h` and `κ₀ = 0`, `δ₁ = 0` is
/// exactly the headway relation `sᵢ₋₁ - sᵢ = d + h vᵢ`.
///
/// The velocity error tracks the spatial reference, `e₁ᵢ = vᵢ - vref(sᵢ)`.
/// `Δᵢ⁰` is the telescoped sum of the `Δⱼ`, `j ≤ i`. The leader carries no
/// spacing error: `δ₁₀ = κe₁₀`, `δ₂₀ = κe₂₀`.
pub fn compute_spacing_time(
    platoon: &[VehicleStateTime],
    params: &PolicyParams,
    profile: &ReferenceProfile,
) -> Result<Vec<TimingErrors>> {
    let mut out = Vec::with_capacity(platoon.len());
    spacing_time_terms(platoon, params, profile, &mut out)?;
    Ok(out.into_iter().map(|t| t.errors).collect())
}

pub(crate) fn spacing_time_terms(
    platoon: &[VehicleStateTime],
    params: &PolicyParams,
    profile: &ReferenceProfile,
    out: &mut Vec<TimeErrorTerms>,
) -> Result<()> {
    let (d, h) = match params.policy {
        Policy::ConstantSpacing { d } => (d, 0.0),
        Policy::ConstantHeadway { d, h } => (d, h),
        Policy::DelayBased { .. } => {
            return Err(Error::InvalidParameter(
                "time-domain spacing errors need a constant spacing or headway policy".into(),
            ))
        }
    };
    let (kappa, kappa0) = (params.kappa, params.kappa0);
    out.clear();
    let Some(lead) = platoon.first() else {
        return Ok(());
    };
    let (vr0, dvr0, _) = profile.vref_derivs(lead.s);
    let e1_lead = lead.v - vr0;
    let e2_lead = lead.a - dvr0 * lead.v;
    out.push(TimeErrorTerms {
        errors: TimingErrors {
            delta: 0.0,
            delta0: 0.0,
            delta1: kappa * e1_lead,
            delta2: kappa * e2_lead,
            e1: e1_lead,
            e2: e2_lead,
            y: -kappa * e1_lead,
        },
        spacing_drift: 0.0,
    });

    // Running sums of Δⱼ and its first two derivatives for Δᵢ⁰.
    let (mut sum0, mut sum1, mut sum2) = (0.0, 0.0, 0.0);
    for pair in platoon.windows(2) {
        let (prev, x) = (&pair[0], &pair[1]);
        let (vr, dvr, ddvr) = profile.vref_derivs(x.s);
        let delta = x.s - prev.s + d + h * vr;
        let delta_d1 = x.v - prev.v + h * dvr * x.v;
        let delta_d2 = x.a - prev.a + h * (ddvr * x.v * x.v + dvr * x.a);
        sum0 += delta;
        sum1 += delta_d1;
        sum2 += delta_d2;
        let e1 = x.v - vr;
        let e2 = x.a - dvr * x.v;
        out.push(TimeErrorTerms {
            errors: TimingErrors {
                delta,
                delta0: sum0,
                delta1: (1.0 - kappa0) * delta + kappa0 * sum0 + kappa * e1,
                delta2: (1.0 - kappa0) * delta_d1 + kappa0 * sum1 + kappa * e2,
                e1,
                e2,
                y: -kappa0 * sum0 - kappa * e1,
            },
            spacing_drift: (1.0 - kappa0) * delta_d2 + kappa0 * sum2,
        });
    }
    Ok(())
}

/// Timing error of a follower from the predecessor's sampled position history.
///
/// Solves `sᵢ₋₁(t_now - Δt - Δᵢ) = s_now` for `Δᵢ` by bisection on a monotone
/// interpolant of the history, to a position residual below 1e-9 m. The sign
/// matches `Δᵢ = tᵢ - tᵢ₋₁ - Δt`: a follower arriving late has `Δᵢ > 0`.
pub fn delay_timing_error_implicit(
    hist_t: &[f64],
    hist_s: &[f64],
    s_now: f64,
    t_now: f64,
    dt: f64,
) -> Result<f64> {
    if hist_t.len() < 2 || hist_t.len() != hist_s.len() {
        return Err(Error::HistoryTooShort);
    }
    if let Some(index) = (1..hist_t.len()).find(|&k| !(hist_t[k] > hist_t[k - 1])) {
        return Err(Error::NonMonotoneHistory { index });
    }
    let pos =
        MonotoneCubic::new(hist_t, hist_s).map_err(|index| Error::NonMonotoneHistory { index })?;
    let (mut lo, mut hi) = pos.domain();
    let (s_lo, s_hi) = (hist_s[0], hist_s[hist_s.len() - 1]);
    if !(s_now >= s_lo && s_now <= s_hi) {
        return Err(Error::HistoryTooShort);
    }
    let residual = |t: f64| pos.eval(t).map(|s| s - s_now);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let r = residual(mid)?;
        if r.abs() < 1e-9 {
            break;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(t_now - mid - dt)
}

/// Per-pair deviations measured by [`check_prop1`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDeviation {
    /// `max |tᵢ - tᵢ₋₁ - Δt|` (s).
    pub timing: f64,
    /// Spread of `tᵢ - tᵢ₋₁` over the segment (s).
    pub gap_variation: f64,
    /// `max |vᵢ - vᵢ₋₁|` (m/s).
    pub velocity: f64,
    /// `max |1/vᵢ - 1/vᵢ₋₁|` (s/m).
    pub inv_velocity: f64,
}

/// Numerical check that constant passage-time gaps and coinciding spatial
/// velocity profiles go together.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop1Report {
    pub tol: f64,
    /// Inverse-velocity tolerance implied by finite-differencing `t(s)`.
    pub derived_inv_velocity_tol: f64,
    pub pairs: Vec<PairDeviation>,
}

impl Prop1Report {
    pub fn max_timing(&self) -> f64 {
        self.pairs.iter().map(|p| p.timing).fold(0.0, f64::max)
    }

    pub fn max_velocity(&self) -> f64 {
        self.pairs.iter().map(|p| p.velocity).fold(0.0, f64::max)
    }

    /// Gap ⇒ velocity direction: whenever a pair keeps its time gap within
    /// `tol`, its inverse velocities agree within the derived tolerance.
    pub fn gap_implies_velocity(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| p.timing > self.tol || p.inv_velocity <= self.derived_inv_velocity_tol)
    }

    /// Velocity ⇒ gap direction: coinciding velocities keep `tᵢ - tᵢ₋₁` constant.
    pub fn velocity_implies_gap(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| p.velocity > self.tol || p.gap_variation <= self.tol)
    }

    pub fn timing_holds(&self) -> bool {
        self.max_timing() <= self.tol
    }

    pub fn velocity_coincides(&self) -> bool {
        self.max_velocity() <= self.tol
    }

    /// Both the delay-based gap and the common velocity profile hold, and
    /// both implications are consistent.
    pub fn passes(&self) -> bool {
        self.timing_holds()
            && self.velocity_coincides()
            && self.gap_implies_velocity()
            && self.velocity_implies_gap()
    }
}

/// Check the space/time equivalence on a spatial-grid trajectory.
pub fn check_prop1(traj: &Trajectory, dt: f64, tol: f64) -> Prop1Report {
    let step = if traj.grid.len() > 1 {
        traj.grid[1] - traj.grid[0]
    } else {
        f64::INFINITY
    };
    let pairs = traj
        .vehicles
        .windows(2)
        .map(|pair| {
            let (prev, cur) = (&pair[0], &pair[1]);
            let mut dev = PairDeviation {
                timing: 0.0,
                gap_variation: 0.0,
                velocity: 0.0,
                inv_velocity: 0.0,
            };
            let (mut gmin, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..cur.len() {
                let gap = cur.t[k] - prev.t[k];
                gmin = gmin.min(gap);
                gmax = gmax.max(gap);
                dev.timing = dev.timing.max((gap - dt).abs());
                dev.velocity = dev.velocity.max((cur.v[k] - prev.v[k]).abs());
                dev.inv_velocity = dev
                    .inv_velocity
                    .max((1.0 / cur.v[k] - 1.0 / prev.v[k]).abs());
            }
            if gmax >= gmin {
                dev.gap_variation = gmax - gmin;
            }
            dev
        })
        .collect();
    Prop1Report {
        tol,
        derived_inv_velocity_tol: 2.0 * tol / step + 1e-6,
        pairs,
    }
}

/// Move velocities and accelerations so that `δᵢ = 0` for every vehicle,
/// keeping the passage times (hence all `Δᵢ`) unchanged.
pub fn project_onto_invariant_set(
    vehicles: &mut [VehicleStateSpace],
    t_ref: f64,
    s: f64,
    profile: &ReferenceProfile,
    params: &PolicyParams,
) -> Result<()> {
    let dt = params.time_gap()?;
    let (kappa, kappa0) = (params.kappa, params.kappa0);
    let w = profile.eval_inv_vref_derivs(s);
    let Some(t_lead) = vehicles.first().map(|x| x.t) else {
        return Ok(());
    };
    let mut e1s: Vec<f64> = Vec::with_capacity(vehicles.len());
    for i in 0..vehicles.len() {
        let (e1, e2) = if i == 0 {
            let delta = vehicles[0].t - t_ref;
            let e1 = -delta / kappa;
            (e1, -e1 / kappa)
        } else {
            let delta = vehicles[i].t - vehicles[i - 1].t - dt;
            let delta0 = vehicles[i].t - t_lead - i as f64 * dt;
            let e1 = -((1.0 - kappa0) * delta + kappa0 * delta0) / kappa;
            let e2 = -((1.0 - kappa0) * (e1 - e1s[i - 1]) + kappa0 * (e1 - e1s[0])) / kappa;
            (e1, e2)
        };
        let v = 1.0 / (w.w0 + e1);
        if !(v > V_FLOOR) {
            return Err(Error::NonPositiveVelocity {
                vehicle: i,
                position: s,
                velocity: v,
            });
        }
        vehicles[i].v = v;
        vehicles[i].a = -v * v * v * (e2 + w.w1);
        e1s.push(e1);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PolicyParams {
        PolicyParams::delay_based(1.0, 2.0, 0.1).unwrap()
    }

    fn state(ts: &[f64], vs: &[f64]) -> PlatoonState {
        PlatoonState {
            s: 100.0,
            t_ref: 10.0,
            vehicles: ts
                .iter()
                .zip(vs)
                .map(|(&t, &v)| VehicleStateSpace { t, v, a: 0.0 })
                .collect(),
        }
    }

    #[test]
    fn perfect_tracking_is_zero() {
        let profile = ReferenceProfile::constant(20.0).unwrap();
        let errs =
            compute_errors_spatial(&state(&[10.0, 11.0, 12.0], &[20.0; 3]), &profile, &params())
                .unwrap();
        for e in errs {
            assert_eq!(e, TimingErrors::default());
        }
    }

    #[test]
    fn single_follower_offset() {
        let profile = ReferenceProfile::constant(20.0).unwrap();
        let errs =
            compute_errors_spatial(&state(&[10.0, 11.5], &[20.0, 20.0]), &profile, &params())
                .unwrap();
        let f = errs[1];
        assert_eq!(f.delta, 0.5);
        assert_eq!(f.e1, 0.0);
        assert!((f.delta1 - 0.5).abs() < 1e-15);
        assert!((f.y + 0.1 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn velocity_error_arithmetic() {
        let profile = ReferenceProfile::constant(20.0).unwrap();
        let errs =
            compute_errors_spatial(&state(&[10.0, 11.0], &[20.0, 19.0]), &profile, &params())
                .unwrap();
        assert!((errs[1].e1 - 1.0 / 380.0).abs() < 1e-15);
    }

    #[test]
    fn spatial_errors_require_delay_policy() {
        let profile = ReferenceProfile::constant(20.0).unwrap();
        let p = PolicyParams::new(Policy::ConstantSpacing { d: 5.0 }, 2.0, 0.1).unwrap();
        assert!(compute_errors_spatial(&state(&[0.0], &[20.0]), &profile, &p).is_err());
        let slow = state(&[10.0, 11.0], &[20.0, 0.05]);
        assert!(matches!(
            compute_errors_spatial(&slow, &profile, &params()),
            Err(Error::NonPositiveVelocity { vehicle: 1, .. })
        ));
    }

    #[test]
    fn policy_validation() {
        assert!(PolicyParams::delay_based(1.0, 2.0, 1.0).is_err());
        assert!(PolicyParams::delay_based(1.0, 2.0, 0.999).is_ok());
        assert!(PolicyParams::delay_based(0.0, 2.0, 0.1).is_err());
        assert!(PolicyParams::delay_based(1.0, 0.0, 0.1).is_err());
        assert!(PolicyParams::new(Policy::ConstantHeadway { d: 1.0, h: 0.0 }, 1.0, 0.0).is_err());
    }

    #[test]
    fn time_domain_spacing() {
        let profile = ReferenceProfile::constant(20.0).unwrap();
        let p = PolicyParams::new(Policy::ConstantSpacing { d: 10.0 }, 0.1, 0.0).unwrap();
        let x = |s| VehicleStateTime { s, v: 20.0, a: 0.0 };
        let errs = compute_spacing_time(&[x(100.0), x(85.0)], &p, &profile).unwrap();
        assert_eq!(errs[1].delta, -5.0);
        let formation = compute_spacing_time(&[x(100.0), x(90.0), x(80.0)], &p, &profile).unwrap();
        assert!(formation.iter().all(|e| e.delta == 0.0 && e.delta1 == 0.0));
    }

    #[test]
    fn headway_equilibrium_has_zero_delta1() {
        // Substitute the headway relation s_{i-1} - s_i = d + h v_i with e1 = 0.
        let profile = ReferenceProfile::constant(20.0).unwrap();
        let (d, h) = (2.0, 0.8);
        let p = PolicyParams::new(Policy::ConstantHeadway { d, h }, h, 0.0).unwrap();
        let lead = VehicleStateTime {
            s: 500.0,
            v: 20.0,
            a: 0.0,
        };
        let f = VehicleStateTime {
            s: 500.0 - (d + h * 20.0),
            v: 20.0,
            a: 0.0,
        };
        let errs = compute_spacing_time(&[lead, f], &p, &profile).unwrap();
        assert!(errs[1].delta1.abs() < 1e-12);
        // Off-reference velocity: δ₁ is still the raw headway error.
        let f2 = VehicleStateTime { v: 22.0, ..f };
        let errs = compute_spacing_time(&[lead, f2], &p, &profile).unwrap();
        let headway_err = f2.s - lead.s + d + h * f2.v;
        assert!((errs[1].delta1 - headway_err).abs() < 1e-12);
    }

    #[test]
    fn implicit_delay_error() {
        let hist_t: Vec<f64> = (0..=200).map(|k| k as f64 * 0.1).collect();
        let hist_s: Vec<f64> = hist_t.iter().map(|t| 20.0 * t).collect();
        // Predecessor passes s = 100 at t = 5; nominal follower passes at t = 6.
        let d = delay_timing_error_implicit(&hist_t, &hist_s, 100.0, 6.0, 1.0).unwrap();
        assert!(d.abs() < 1e-10);
        // Predecessor passed 0.3 s earlier than nominal, so the follower is 0.3 s late.
        let d = delay_timing_error_implicit(&hist_t, &hist_s, 100.0, 6.3, 1.0).unwrap();
        assert!((d - 0.3).abs() < 1e-10, "{d}");
        assert_eq!(
            delay_timing_error_implicit(&hist_t, &hist_s, 5000.0, 6.0, 1.0),
            Err(Error::HistoryTooShort)
        );
        let mut bad = hist_t.clone();
        bad[10] = bad[9];
        assert!(matches!(
            delay_timing_error_implicit(&bad, &hist_s, 100.0, 6.0, 1.0),
            Err(Error::NonMonotoneHistory { .. })
        ));
    }

    #[test]
    fn projection_zeroes_delta() {
        let profile = ReferenceProfile::cosine_dip(20.0, 2.0, 300.0, 500.0).unwrap();
        let p = params();
        let mut xs: Vec<VehicleStateSpace> = [0.03, 1.01, 1.97, 3.02]
            .iter()
            .map(|&t| VehicleStateSpace { t, v: 20.0, a: 0.0 })
            .collect();
        project_onto_invariant_set(&mut xs, 0.0, 350.0, &profile, &p).unwrap();
        let errs = compute_errors_spatial(
            &PlatoonState {
                s: 350.0,
                t_ref: 0.0,
                vehicles: xs,
            },
            &profile,
            &p,
        )
        .unwrap();
        for e in errs {
            assert!(e.delta1.abs() < 1e-14 && e.delta2.abs() < 1e-14, "{e:?}");
        }
    }
}
