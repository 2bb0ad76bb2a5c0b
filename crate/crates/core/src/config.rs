//! Scenario files: TOML with the sections `[platoon]`, `[policy]`, `[model]`,
//! `[controller]`, `[reference]`, `[disturbance]`, `[sim]` and `[sweep]`.
//!
//! Every key is optional and falls back to the example parameter set
//! (τ = 1, Δt = 1, κ₀ = 0.1, κ = 2, ω₀ = 0.05, ζ₀ = 0.9). Unknown keys are errors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::ControllerGains;
use crate::error::{Error, Result};
use crate::reference::ReferenceProfile;
use crate::sim::rk4::UniformGrid;
use crate::sim::scenario::{AppliesTo, DisturbanceKind, DisturbanceSpec, IcSpread, ScenarioConfig};
use crate::sim::trajectory::Domain;
use crate::spacing::{Policy, PolicyParams};
use crate::vehicle::VehicleParams;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub platoon: PlatoonSection,
    pub policy: PolicySection,
    pub model: ModelSection,
    pub controller: ControllerSection,
    pub reference: ReferenceSection,
    pub disturbance: DisturbanceSection,
    pub sim: SimSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlatoonSection {
    pub n_followers: usize,
    /// Time gap of the delay-based policy (s).
    pub dt: f64,
}

impl Default for PlatoonSection {
    fn default() -> Self {
        Self {
            n_followers: 5,
            dt: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyType {
    #[default]
    DelayBased,
    ConstantHeadway,
    ConstantSpacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    #[serde(rename = "type")]
    pub kind: PolicyType,
    pub kappa: f64,
    pub kappa0: f64,
    /// Standstill gap of the spacing and headway policies (m).
    pub d: f64,
    /// Time headway (s).
    pub h: f64,
}

impl Default for PolicySection {
    fn default() -> Self {
        Self {
            kind: PolicyType::DelayBased,
            kappa: 2.0,
            kappa0: 0.1,
            d: 18.0,
            h: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub tau: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { tau: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    pub omega0: f64,
    pub zeta0: f64,
}

impl Default for ControllerSection {
    fn default() -> Self {
        Self {
            omega0: 0.05,
            zeta0: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceType {
    #[default]
    Constant,
    CosineDip,
}

/// `constant` reads `velocity`; `cosine_dip` reads `base`, `depth`, `start`, `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceSection {
    #[serde(rename = "type")]
    pub kind: ReferenceType,
    pub velocity: f64,
    pub base: f64,
    pub depth: f64,
    pub start: f64,
    pub end: f64,
}

impl Default for ReferenceSection {
    fn default() -> Self {
        Self {
            kind: ReferenceType::Constant,
            velocity: 20.0,
            base: 20.0,
            depth: 2.0,
            start: 300.0,
            end: 500.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceType {
    #[default]
    None,
    SineOfS,
    PerVehicleTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisturbanceSection {
    #[serde(rename = "type")]
    pub kind: DisturbanceType,
    /// m/s².
    pub amplitude: f64,
    /// rad per unit of the independent variable.
    pub spatial_freq: f64,
    /// Per-vehicle amplitudes for `per_vehicle_table`, leader first.
    pub amplitudes: Vec<f64>,
    pub applies_to: AppliesTo,
}

impl Default for DisturbanceSection {
    fn default() -> Self {
        Self {
            kind: DisturbanceType::None,
            amplitude: 1.0,
            spatial_freq: 0.01,
            amplitudes: Vec::new(),
            applies_to: AppliesTo::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub domain: Domain,
    pub s_start: f64,
    pub s_end: f64,
    pub t_start: f64,
    /// Derived from the spatial range and the slowest reference speed if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Defaults to 0.1 m (spatial) or 0.005 s (temporal).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub seed: u64,
    pub ic_spread_timing: f64,
    pub ic_spread_velocity: f64,
    pub ic_spread_accel: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            domain: Domain::Spatial,
            s_start: 0.0,
            s_end: 1500.0,
            t_start: 0.0,
            t_end: None,
            step: None,
            seed: 1,
            ic_spread_timing: 0.0,
            ic_spread_velocity: 0.0,
            ic_spread_accel: 0.0,
        }
    }
}

pub const DEFAULT_SPATIAL_STEP: f64 = 0.1;
pub const DEFAULT_TEMPORAL_STEP: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_list: Vec<usize>,
    pub kappa0_list: Vec<f64>,
    /// Largest relative increase of the sup norm between the two largest N
    /// still counted as saturated.
    pub saturation_tol: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_list: vec![10, 20, 40, 80],
            kappa0_list: vec![0.0, 0.05, 0.1, 0.15, 0.2],
            saturation_tol: 0.05,
        }
    }
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Full TOML rendering with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config sections always serialize")
    }

    pub fn profile(&self) -> Result<ReferenceProfile> {
        let r = &self.reference;
        match r.kind {
            ReferenceType::Constant => ReferenceProfile::constant(r.velocity),
            ReferenceType::CosineDip => {
                ReferenceProfile::cosine_dip(r.base, r.depth, r.start, r.end)
            }
        }
    }

    pub fn disturbance(&self) -> DisturbanceSpec {
        let d = &self.disturbance;
        let kind = match d.kind {
            DisturbanceType::None => DisturbanceKind::None,
            DisturbanceType::SineOfS => DisturbanceKind::SineOfS {
                amplitude: d.amplitude,
                freq: d.spatial_freq,
            },
            DisturbanceType::PerVehicleTable => DisturbanceKind::PerVehicleTable {
                amplitudes: d.amplitudes.clone(),
                freq: d.spatial_freq,
            },
        };
        DisturbanceSpec {
            kind,
            applies_to: d.applies_to,
        }
    }

    fn delay_policy(&self) -> Result<PolicyParams> {
        PolicyParams::delay_based(self.platoon.dt, self.policy.kappa, self.policy.kappa0)
    }

    fn gap_policy(&self) -> Result<PolicyParams> {
        let p = &self.policy;
        let policy = match p.kind {
            PolicyType::ConstantSpacing => Policy::ConstantSpacing { d: p.d },
            _ => Policy::ConstantHeadway { d: p.d, h: p.h },
        };
        PolicyParams::new(policy, p.kappa, p.kappa0)
    }

    /// The scenario this file describes, in its configured domain.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let policy = match self.policy.kind {
            PolicyType::DelayBased => self.delay_policy()?,
            _ => self.gap_policy()?,
        };
        match (self.sim.domain, self.policy.kind) {
            (Domain::Spatial, PolicyType::DelayBased)
            | (Domain::Temporal, PolicyType::ConstantHeadway)
            | (Domain::Temporal, PolicyType::ConstantSpacing) => {}
            (domain, kind) => {
                return Err(Error::InvalidParameter(format!(
                    "policy {kind:?} cannot run in the {domain:?} domain"
                )))
            }
        }
        self.build(self.sim.domain, policy)
    }

    /// The delay-based spatial run and the headway (or constant spacing)
    /// temporal run of the same scenario.
    pub fn compare_scenarios(&self) -> Result<(ScenarioConfig, ScenarioConfig)> {
        Ok((
            self.build(Domain::Spatial, self.delay_policy()?)?,
            self.build(Domain::Temporal, self.gap_policy()?)?,
        ))
    }

    fn build(&self, domain: Domain, policy: PolicyParams) -> Result<ScenarioConfig> {
        let profile = self.profile()?;
        let sim = &self.sim;
        let grid = match domain {
            Domain::Spatial => UniformGrid::new(
                sim.s_start,
                sim.s_end,
                sim.step.unwrap_or(DEFAULT_SPATIAL_STEP),
            )?,
            Domain::Temporal => {
                let t_end = sim.t_end.unwrap_or_else(|| self.derived_t_end(&profile));
                UniformGrid::new(
                    sim.t_start,
                    t_end,
                    sim.step.unwrap_or(DEFAULT_TEMPORAL_STEP),
                )?
            }
        };
        let cfg = ScenarioConfig {
            n_followers: self.platoon.n_followers,
            domain,
            grid,
            seed: sim.seed,
            ic_spread: IcSpread {
                timing: sim.ic_spread_timing,
                velocity: sim.ic_spread_velocity,
                accel: sim.ic_spread_accel,
            },
            disturbance: self.disturbance(),
            policy,
            gains: ControllerGains::new(
                self.controller.omega0,
                self.controller.zeta0,
                self.policy.kappa,
            )?,
            vehicle: VehicleParams::new(self.model.tau)?,
            profile,
            lead_start: sim.s_start,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Long enough for the last vehicle to cover `[s_start, s_end]` at the
    /// slowest reference speed, with 10% slack.
    fn derived_t_end(&self, profile: &ReferenceProfile) -> f64 {
        let p = &self.policy;
        let gap = p.d + p.h * profile.v_max();
        let length = self.sim.s_end - self.sim.s_start + self.platoon.n_followers as f64 * gap;
        self.sim.t_start + 1.1 * length / profile.v_min()
    }
}
