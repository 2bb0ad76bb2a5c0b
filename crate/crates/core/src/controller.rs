//! Feedback-linearizing platoon controllers.
//!
//! The spatial-domain law renders the `δ` coordinates of every vehicle a
//! linear double integrator `δ̊ = Aδ + κBũ` and closes it with `ũ = Kδ`.
//! The time-domain headway law does the same with `t` as independent variable.

use crate::error::{Error, Result};
use crate::reference::{InvVrefDerivs, ReferenceProfile};
use crate::spacing::{spacing_time_terms, PolicyParams, TimeErrorTerms, TimingErrors};
use crate::vehicle::{VehicleParams, VehicleStateSpace, VehicleStateTime};

/// Feedback row `K = (K₁, K₂)` acting on `(δ₁, δ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub omega0: f64,
    pub zeta0: f64,
    pub kappa: f64,
    pub k1: f64,
    pub k2: f64,
}

/// Complex eigenvalue as `(re, im)`.
pub type Eigenvalue = (f64, f64);

impl ControllerGains {
    /// Place the poles of `A + κBK` at the roots of `λ² + 2ζ₀ω₀λ + ω₀²`.
    pub fn new(omega0: f64, zeta0: f64, kappa: f64) -> Result<Self> {
        if !(omega0 > 0.0 && zeta0 > 0.0 && kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gains need omega0 > 0, zeta0 > 0, kappa > 0 (got {omega0}, {zeta0}, {kappa})"
            )));
        }
        let k1 = -omega0 * omega0 / kappa;
        let k2 = -2.0 * zeta0 * omega0 / kappa;
        let mut gains = Self::from_feedback(k1, k2, kappa)?;
        gains.omega0 = omega0;
        gains.zeta0 = zeta0;
        Ok(gains)
    }

    /// Use a given feedback row; fails unless `A + κBK` is Hurwitz.
    pub fn from_feedback(k1: f64, k2: f64, kappa: f64) -> Result<Self> {
        let gains = Self {
            omega0: (-kappa * k1).max(0.0).sqrt(),
            zeta0: f64::NAN,
            kappa,
            k1,
            k2,
        };
        let [l1, l2] = gains.closed_loop_eigenvalues();
        if !(l1.0 < 0.0 && l2.0 < 0.0) {
            return Err(Error::NotHurwitz {
                re1: l1.0,
                re2: l2.0,
            });
        }
        Ok(gains)
    }

    /// Equivalent gains for the time domain at cruise speed `v_nom`: spatial
    /// eigenvalues `λ` map to temporal eigenvalues `v_nom λ`.
    pub fn for_time_domain(&self, v_nom: f64) -> Result<Self> {
        if !(v_nom > 0.0 && v_nom.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "nominal velocity must be positive, got {v_nom}"
            )));
        }
        let mut gains = Self::from_feedback(
            self.k1 * v_nom.powi(3),
            self.k2 * v_nom * v_nom,
            self.kappa / v_nom,
        )?;
        gains.omega0 = self.omega0 * v_nom;
        gains.zeta0 = self.zeta0;
        Ok(gains)
    }

    /// Eigenvalues of `[[0, 1], [κK₁, κK₂]]`.
    pub fn closed_loop_eigenvalues(&self) -> [Eigenvalue; 2] {
        let trace = self.kappa * self.k2;
        let det = -self.kappa * self.k1;
        let disc = trace * trace - 4.0 * det;
        if disc >= 0.0 {
            let r = disc.sqrt();
            [(0.5 * (trace + r), 0.0), (0.5 * (trace - r), 0.0)]
        } else {
            let im = 0.5 * (-disc).sqrt();
            [(0.5 * trace, im), (0.5 * trace, -im)]
        }
    }

    pub fn virtual_input(&self, e: &TimingErrors) -> f64 {
        self.k1 * e.delta1 + self.k2 * e.delta2
    }
}

pub fn make_gains(omega0: f64, zeta0: f64, kappa: f64) -> Result<ControllerGains> {
    ControllerGains::new(omega0, zeta0, kappa)
}

/// Who a vehicle couples to in the spatial control law.
#[derive(Debug, Clone, Copy)]
pub enum Coupling<'a> {
    /// The platoon leader tracks the reference clock; its predecessor and
    /// leader terms refer to a virtual vehicle riding the reference exactly.
    Leader,
    Follower {
        predecessor: &'a VehicleStateSpace,
        leader: &'a VehicleStateSpace,
    },
}

/// Spatial-domain control input `uᵢ(s)` (m/s²).
///
/// ```text
/// ūᵢ = aᵢ/(κvᵢ³) - (1-κ₀)aᵢ₋₁/(κvᵢ₋₁³) - κ₀a₀/(κv₀³) + K₁δ₁ᵢ + K₂δ₂ᵢ
/// uᵢ = aᵢ + 3τaᵢ²/vᵢ - τvᵢ⁴ (d²/ds²(1/vref) + ūᵢ)
/// ```
pub fn spatial_control(
    errors: &TimingErrors,
    own: &VehicleStateSpace,
    coupling: Coupling<'_>,
    inv_vref: &InvVrefDerivs,
    gains: &ControllerGains,
    policy: &PolicyParams,
    vehicle: &VehicleParams,
) -> f64 {
    let (kappa, kappa0) = (policy.kappa, policy.kappa0);
    let jerk_term = |x: &VehicleStateSpace| x.a / (x.v * x.v * x.v);
    let coupling_terms = match coupling {
        // -a/v³ of the virtual reference vehicle equals d/ds(1/vref).
        Coupling::Leader => inv_vref.w1 / kappa,
        Coupling::Follower {
            predecessor,
            leader,
        } => -(1.0 - kappa0) / kappa * jerk_term(predecessor) - kappa0 / kappa * jerk_term(leader),
    };
    let u_bar = jerk_term(own) / kappa + coupling_terms + gains.virtual_input(errors);
    let (v, a, tau) = (own.v, own.a, vehicle.tau);
    let v2 = v * v;
    a + 3.0 * tau * a * a / v - tau * v2 * v2 * (inv_vref.w2 + u_bar)
}

/// Time-domain comparison controller for constant spacing/headway policies.
///
/// `policy` and `gains` are expected in time units (see
/// [`ControllerGains::for_time_domain`]). Returns one input per vehicle.
pub fn headway_controls(
    platoon: &[VehicleStateTime],
    profile: &ReferenceProfile,
    gains: &ControllerGains,
    policy: &PolicyParams,
    vehicle: &VehicleParams,
) -> Result<Vec<f64>> {
    let mut terms = Vec::with_capacity(platoon.len());
    let mut out = Vec::with_capacity(platoon.len());
    headway_controls_into(
        platoon, profile, gains, policy, vehicle, &mut terms, &mut out,
    )?;
    Ok(out)
}

/// Control input of vehicle `i` alone; see [`headway_controls`].
pub fn headway_control_time(
    platoon: &[VehicleStateTime],
    i: usize,
    profile: &ReferenceProfile,
    gains: &ControllerGains,
    policy: &PolicyParams,
    vehicle: &VehicleParams,
) -> Result<f64> {
    let all = headway_controls(&platoon[..=i], profile, gains, policy, vehicle)?;
    Ok(all[i])
}

pub(crate) fn headway_controls_into(
    platoon: &[VehicleStateTime],
    profile: &ReferenceProfile,
    gains: &ControllerGains,
    policy: &PolicyParams,
    vehicle: &VehicleParams,
    terms: &mut Vec<TimeErrorTerms>,
    out: &mut Vec<f64>,
) -> Result<()> {
    spacing_time_terms(platoon, policy, profile, terms)?;
    out.clear();
    for (x, term) in platoon.iter().zip(terms.iter()) {
        let (_, dvr, ddvr) = profile.vref_derivs(x.s);
        // δ̇₂ = (spacing drift) + κ(ȧ - vref'' v² - vref' a) is set to κ K δ.
        let jerk = gains.virtual_input(&term.errors) + ddvr * x.v * x.v + dvr * x.a
            - term.spacing_drift / policy.kappa;
        out.push(x.a + vehicle.tau * jerk);
    }
    Ok(())
}
