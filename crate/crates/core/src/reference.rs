//! Spatially varying reference velocity profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::sim::rk4::Rk4;

/// Shape of the reference velocity as a function of road position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    Constant {
        velocity: f64,
    },
    /// `base - depth * (1 - cos(2π (s - start) / (end - start)))` on `[start, end]`,
    /// `base` elsewhere. The minimum `base - 2 depth` is reached mid-dip.
    CosineDip {
        base: f64,
        depth: f64,
        start: f64,
        end: f64,
    },
}

/// Reference velocity `vref(s)` with analytic derivatives.
///
/// Immutable after construction and cheap to copy, so parallel runs can
/// share one instance freely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferenceProfile {
    kind: ProfileKind,
}

/// `(1/vref, d/ds (1/vref), d²/ds² (1/vref))` at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvVrefDerivs {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

impl ReferenceProfile {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        match kind {
            ProfileKind::Constant { velocity } => {
                ensure(velocity.is_finite() && velocity > 0.0, || {
                    format!("constant reference velocity must be positive, got {velocity}")
                })?;
            }
            ProfileKind::CosineDip {
                base,
                depth,
                start,
                end,
            } => {
                ensure(base.is_finite() && depth.is_finite(), || {
                    "cosine dip parameters must be finite".into()
                })?;
                ensure(end > start, || {
                    format!("cosine dip needs end > start, got [{start}, {end}]")
                })?;
                let lo = base - 2.0 * depth.max(0.0);
                let hi = base - 2.0 * depth.min(0.0);
                ensure(lo > 0.0 && hi > 0.0, || {
                    format!("cosine dip velocity range [{lo}, {hi}] must stay positive")
                })?;
            }
        }
        Ok(Self { kind })
    }

    pub fn constant(velocity: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant { velocity })
    }

    pub fn cosine_dip(base: f64, depth: f64, start: f64, end: f64) -> Result<Self> {
        Self::new(ProfileKind::CosineDip {
            base,
            depth,
            start,
            end,
        })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// Velocity away from any spatial feature; used as the nominal cruise speed.
    pub fn nominal_velocity(&self) -> f64 {
        match self.kind {
            ProfileKind::Constant { velocity } => velocity,
            ProfileKind::CosineDip { base, .. } => base,
        }
    }

    pub fn v_min(&self) -> f64 {
        match self.kind {
            ProfileKind::Constant { velocity } => velocity,
            ProfileKind::CosineDip { base, depth, .. } => base.min(base - 2.0 * depth),
        }
    }

    pub fn v_max(&self) -> f64 {
        match self.kind {
            ProfileKind::Constant { velocity } => velocity,
            ProfileKind::CosineDip { base, depth, .. } => base.max(base - 2.0 * depth),
        }
    }

    pub fn eval_vref(&self, s: f64) -> f64 {
        self.vref_derivs(s).0
    }

    /// `(vref, dvref/ds, d²vref/ds²)`.
    pub fn vref_derivs(&self, s: f64) -> (f64, f64, f64) {
        match self.kind {
            ProfileKind::Constant { velocity } => (velocity, 0.0, 0.0),
            ProfileKind::CosineDip {
                base,
                depth,
                start,
                end,
            } => {
                if s < start || s > end {
                    return (base, 0.0, 0.0);
                }
                let k = 2.0 * PI / (end - start);
                let phase = k * (s - start);
                let v = base - depth * (1.0 - phase.cos());
                let dv = -depth * k * phase.sin();
                let ddv = -depth * k * k * phase.cos();
                (v, dv, ddv)
            }
        }
    }

    pub fn eval_inv_vref_derivs(&self, s: f64) -> InvVrefDerivs {
        let (v, dv, ddv) = self.vref_derivs(s);
        let w0 = 1.0 / v;
        let w1 = -dv / (v * v);
        let w2 = 2.0 * dv * dv / (v * v * v) - ddv / (v * v);
        InvVrefDerivs { w0, w1, w2 }
    }

    /// Equilibrium acceleration `vref · dvref/ds` of a vehicle riding the profile.
    pub fn equilibrium_accel(&self, s: f64) -> f64 {
        let (v, dv, _) = self.vref_derivs(s);
        v * dv
    }

    /// Nominal traversal time `∫_{s_start}^{s} 1/vref dσ`, integrated with the
    /// same fixed-step RK4 scheme used by the platoon simulator.
    pub fn eval_tref(&self, s_start: f64, s: f64, step: f64) -> f64 {
        if s <= s_start {
            return 0.0;
        }
        let mut rk = Rk4::new(1);
        let mut state = [0.0];
        let n = ((s - s_start) / step).floor() as usize;
        let mut field = |x: f64, _y: &[f64], dy: &mut [f64]| -> Result<()> {
            dy[0] = 1.0 / self.eval_vref(x);
            Ok(())
        };
        for k in 0..n {
            let x = s_start + k as f64 * step;
            rk.step(&mut field, x, step, &mut state)
                .expect("reference clock field is finite");
        }
        let covered = s_start + n as f64 * step;
        let rest = s - covered;
        if rest > 1e-12 * step {
            rk.step(&mut field, covered, rest, &mut state)
                .expect("reference clock field is finite");
        }
        state[0]
    }
}
