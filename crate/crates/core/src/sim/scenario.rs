use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::controller::ControllerGains;
use crate::error::{ensure, Result};
use crate::reference::ReferenceProfile;
use crate::sim::rk4::UniformGrid;
use crate::sim::trajectory::Domain;
use crate::spacing::PolicyParams;
use crate::vehicle::VehicleParams;

/// Half-widths of the uniform initial-condition perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IcSpread {
    /// Passage-time offset (s).
    pub timing: f64,
    /// Velocity (m/s).
    pub velocity: f64,
    /// Acceleration (m/s²).
    pub accel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IcPerturbation {
    pub timing: f64,
    pub velocity: f64,
    pub accel: f64,
}

/// Per-vehicle perturbations, uniform in `[-spread, spread]` componentwise.
///
/// Draws come from xoshiro256** seeded through SplitMix64, in the order
/// (timing, velocity, accel) per vehicle, so a seed means the same numbers on
/// every platform.
pub fn gen_initial_conditions(
    seed: u64,
    n: usize,
    spread: &IcSpread,
) -> Result<Vec<IcPerturbation>> {
    for (name, value) in [
        ("timing", spread.timing),
        ("velocity", spread.velocity),
        ("accel", spread.accel),
    ] {
        ensure(value >= 0.0 && value.is_finite(), || {
            format!("ic spread {name} must be finite and >= 0, got {value}")
        })?;
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut draw = |half_width: f64| {
        let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        half_width * (2.0 * unit - 1.0)
    };
    Ok((0..n)
        .map(|_| IcPerturbation {
            timing: draw(spread.timing),
            velocity: draw(spread.velocity),
            accel: draw(spread.accel),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DisturbanceKind {
    #[default]
    None,
    /// `w(x) = amplitude · sin(freq · x)`, `x` being the independent variable.
    SineOfS { amplitude: f64, freq: f64 },
    /// Vehicle-specific amplitudes of the same sine; missing entries are zero.
    PerVehicleTable { amplitudes: Vec<f64>, freq: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppliesTo {
    #[default]
    All,
    Followers,
    Leader,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DisturbanceSpec {
    pub kind: DisturbanceKind,
    pub applies_to: AppliesTo,
}

impl DisturbanceSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn sine(amplitude: f64, freq: f64, applies_to: AppliesTo) -> Self {
        Self {
            kind: DisturbanceKind::SineOfS { amplitude, freq },
            applies_to,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match &self.kind {
            DisturbanceKind::None => true,
            DisturbanceKind::SineOfS { amplitude, freq } => {
                amplitude.is_finite() && freq.is_finite()
            }
            DisturbanceKind::PerVehicleTable { amplitudes, freq } => {
                freq.is_finite() && amplitudes.iter().all(|a| a.is_finite())
            }
        };
        ensure(finite, || "disturbance parameters must be finite".into())
    }

    /// Disturbance acting on `vehicle` at independent variable `x`.
    pub fn value(&self, vehicle: usize, x: f64) -> f64 {
        let active = match self.applies_to {
            AppliesTo::All => true,
            AppliesTo::Followers => vehicle > 0,
            AppliesTo::Leader => vehicle == 0,
        };
        if !active {
            return 0.0;
        }
        match &self.kind {
            DisturbanceKind::None => 0.0,
            DisturbanceKind::SineOfS { amplitude, freq } => amplitude * (freq * x).sin(),
            DisturbanceKind::PerVehicleTable { amplitudes, freq } => {
                amplitudes.get(vehicle).copied().unwrap_or(0.0) * (freq * x).sin()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            DisturbanceKind::None => true,
            DisturbanceKind::SineOfS { amplitude, .. } => *amplitude == 0.0,
            DisturbanceKind::PerVehicleTable { amplitudes, .. } => {
                amplitudes.iter().all(|a| *a == 0.0)
            }
        }
    }
}

/// Everything one run needs. Policy weights and gains are in spatial units;
/// time-domain runs rescale them by the profile's nominal velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Followers behind the leader; the platoon has `n_followers + 1` vehicles.
    pub n_followers: usize,
    pub domain: Domain,
    /// Positions (m) for spatial runs, times (s) for temporal runs.
    pub grid: UniformGrid,
    pub seed: u64,
    pub ic_spread: IcSpread,
    pub disturbance: DisturbanceSpec,
    pub policy: PolicyParams,
    pub gains: ControllerGains,
    pub vehicle: VehicleParams,
    pub profile: ReferenceProfile,
    /// Leader position at the first grid point of a temporal run (m).
    pub lead_start: f64,
}

impl ScenarioConfig {
    pub fn n_vehicles(&self) -> usize {
        self.n_followers + 1
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.n_followers >= 1, || {
            "n_followers must be at least 1".into()
        })?;
        self.disturbance.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spread_is_exact() {
        let p = gen_initial_conditions(7, 4, &IcSpread::default()).unwrap();
        assert!(p.iter().all(|x| *x == IcPerturbation::default()));
    }

    #[test]
    fn seeded_draws_repeat_and_stay_in_range() {
        let spread = IcSpread {
            timing: 0.5,
            velocity: 1.0,
            accel: 0.0,
        };
        let a = gen_initial_conditions(42, 50, &spread).unwrap();
        assert_eq!(a, gen_initial_conditions(42, 50, &spread).unwrap());
        assert_ne!(a, gen_initial_conditions(43, 50, &spread).unwrap());
        assert!(a
            .iter()
            .all(|x| x.timing.abs() <= 0.5 && x.velocity.abs() <= 1.0 && x.accel == 0.0));
        assert!(gen_initial_conditions(
            1,
            1,
            &IcSpread {
                timing: -1.0,
                ..spread
            }
        )
        .is_err());
    }

    #[test]
    fn disturbance_selection() {
        let d = DisturbanceSpec::sine(1.0, 0.01, AppliesTo::Followers);
        assert_eq!(d.value(0, 100.0), 0.0);
        assert!((d.value(3, 100.0) - 1f64.sin()).abs() < 1e-15);
        let table = DisturbanceSpec {
            kind: DisturbanceKind::PerVehicleTable {
                amplitudes: vec![0.0, 2.0],
                freq: 0.01,
            },
            applies_to: AppliesTo::All,
        };
        assert!((table.value(1, 100.0) - 2.0 * 1f64.sin()).abs() < 1e-15);
        assert_eq!(table.value(5, 100.0), 0.0);
    }
}
