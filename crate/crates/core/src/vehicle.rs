//! Third-order longitudinal vehicle model in time and space, plus resampling
//! of recorded trajectories between the two domains.
//!
//! Time domain: `ṡ = v`, `v̇ = a + w`, `τ ȧ = -a + u`. Dividing by `v` gives
//! the spatial form with passage time `t(s)` as a state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::sim::rk4::UniformGrid;
use crate::sim::trajectory::{Domain, Sample, Trajectory, VehicleSeries};

/// Below this velocity (m/s) the spatial description is treated as broken down.
pub const V_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Actuator time constant (s).
    pub tau: f64,
}

impl VehicleParams {
    pub fn new(tau: f64) -> Result<Self> {
        if tau > 0.0 && tau.is_finite() {
            Ok(Self { tau })
        } else {
            Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )))
        }
    }
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self { tau: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleStateTime {
    pub s: f64,
    pub v: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleStateSpace {
    pub t: f64,
    pub v: f64,
    pub a: f64,
}

pub fn time_rhs(x: &VehicleStateTime, u: f64, w: f64, p: &VehicleParams) -> VehicleStateTime {
    VehicleStateTime {
        s: x.v,
        v: x.a + w,
        a: (-x.a + u) / p.tau,
    }
}

/// Spatial derivative; `vehicle` and `position` only label the error.
pub fn space_rhs_checked(
    x: &VehicleStateSpace,
    u: f64,
    w: f64,
    p: &VehicleParams,
    vehicle: usize,
    position: f64,
) -> Result<VehicleStateSpace> {
    if !(x.v > V_FLOOR) {
        return Err(Error::NonPositiveVelocity {
            vehicle,
            position,
            velocity: x.v,
        });
    }
    let inv_v = 1.0 / x.v;
    Ok(VehicleStateSpace {
        t: inv_v,
        v: (x.a + w) * inv_v,
        a: (-x.a + u) / p.tau * inv_v,
    })
}

pub fn space_rhs(
    x: &VehicleStateSpace,
    u: f64,
    w: f64,
    p: &VehicleParams,
) -> Result<VehicleStateSpace> {
    space_rhs_checked(x, u, w, p, 0, f64::NAN)
}

/// Resample a time-domain trajectory onto the spatial grid `grid`.
///
/// Each vehicle's recorded channels are interpolated (monotone cubic) as
/// functions of its own position; the grid must lie inside every vehicle's
/// travelled range.
pub fn time_to_space_traj(traj: &Trajectory, grid: &UniformGrid) -> Result<Trajectory> {
    resample(
        traj,
        grid,
        Domain::Spatial,
        |series| &series.s,
        |vehicle, index| Error::NonMonotonePosition { vehicle, index },
    )
}

/// Resample a spatial-domain trajectory onto the time grid `grid`, using each
/// vehicle's passage time `t(s)` as the abscissa.
pub fn space_to_time_traj(traj: &Trajectory, grid: &UniformGrid) -> Result<Trajectory> {
    resample(
        traj,
        grid,
        Domain::Temporal,
        |series| &series.t,
        |vehicle, index| Error::NonMonotoneTime { vehicle, index },
    )
}

fn resample(
    traj: &Trajectory,
    grid: &UniformGrid,
    target: Domain,
    abscissa: impl Fn(&VehicleSeries) -> &Vec<f64>,
    monotone_err: impl Fn(usize, usize) -> Error,
) -> Result<Trajectory> {
    let points: Vec<f64> = grid.points().collect();
    let mut out = Trajectory {
        domain: target,
        grid: points.clone(),
        vehicles: Vec::with_capacity(traj.vehicles.len()),
    };
    for (i, series) in traj.vehicles.iter().enumerate() {
        let xs = abscissa(series);
        let channels: [&Vec<f64>; 13] = [
            &series.t,
            &series.s,
            &series.v,
            &series.a,
            &series.u,
            &series.w,
            &series.delta,
            &series.delta0,
            &series.delta1,
            &series.delta2,
            &series.e1,
            &series.e2,
            &series.y,
        ];
        let interps = channels
            .iter()
            .map(|ys| MonotoneCubic::new(xs, ys).map_err(|k| monotone_err(i, k)))
            .collect::<Result<Vec<_>>>()?;
        let mut resampled = VehicleSeries::with_capacity(points.len());
        for &x in &points {
            let mut vals = [0.0; 13];
            for (slot, m) in vals.iter_mut().zip(&interps) {
                *slot = m.eval(x)?;
            }
            let mut sample = Sample {
                t: vals[0],
                s: vals[1],
                v: vals[2],
                a: vals[3],
                u: vals[4],
                w: vals[5],
                delta: vals[6],
                delta0: vals[7],
                delta1: vals[8],
                delta2: vals[9],
                e1: vals[10],
                e2: vals[11],
                y: vals[12],
            };
            // The abscissa channel is exact on the new grid.
            match target {
                Domain::Spatial => sample.s = x,
                Domain::Temporal => sample.t = x,
            }
            resampled.push(&sample);
        }
        out.vehicles.push(resampled);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_rhs_examples() {
        let p = VehicleParams::default();
        let x = VehicleStateTime {
            s: 0.0,
            v: 20.0,
            a: 0.0,
        };
        assert_eq!(
            time_rhs(&x, 0.0, 0.0, &p),
            VehicleStateTime {
                s: 20.0,
                v: 0.0,
                a: 0.0
            }
        );
        let x1 = VehicleStateTime { a: 1.0, ..x };
        assert_eq!(
            time_rhs(&x1, 1.0, 0.0, &p),
            VehicleStateTime {
                s: 20.0,
                v: 1.0,
                a: 0.0
            }
        );
        assert_eq!(time_rhs(&x, 0.0, 0.5, &p).v, 0.5);
    }

    #[test]
    fn space_rhs_examples() {
        let p = VehicleParams::default();
        let d = space_rhs(
            &VehicleStateSpace {
                t: 3.0,
                v: 20.0,
                a: 0.0,
            },
            0.0,
            0.0,
            &p,
        )
        .unwrap();
        assert_eq!((d.t, d.v, d.a), (0.05, 0.0, 0.0));
        let d = space_rhs(
            &VehicleStateSpace {
                t: 0.0,
                v: 20.0,
                a: 1.0,
            },
            0.0,
            0.0,
            &p,
        )
        .unwrap();
        assert_eq!((d.t, d.v, d.a), (0.05, 0.05, -0.05));
        let d = space_rhs(
            &VehicleStateSpace {
                t: 0.0,
                v: 10.0,
                a: 2.0,
            },
            2.0,
            0.0,
            &p,
        )
        .unwrap();
        assert_eq!((d.t, d.v, d.a), (0.1, 0.2, 0.0));
    }

    #[test]
    fn velocity_floor() {
        let p = VehicleParams::default();
        let r = space_rhs_checked(
            &VehicleStateSpace {
                t: 0.0,
                v: 0.05,
                a: 0.0,
            },
            0.0,
            0.0,
            &p,
            3,
            42.0,
        );
        assert!(matches!(
            r,
            Err(Error::NonPositiveVelocity { vehicle: 3, .. })
        ));
        assert!(VehicleParams::new(0.0).is_err());
    }
}
