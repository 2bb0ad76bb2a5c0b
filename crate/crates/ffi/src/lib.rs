//! C ABI over `platoon-core`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free`. Every fallible call returns a [`PlatoonStatus`]; on
//! failure [`platoon_last_error`] describes what went wrong on this thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};

use platoon_core::config::ConfigFile;
use platoon_core::sim::{run_spatial, run_temporal, Domain, ScenarioConfig, Trajectory};
use platoon_core::stability::{compose_cascade_bound, IssBoundSpec};
use platoon_core::{make_gains, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlatoonStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidParameter = 4,
    Simulation = 5,
    OutOfRange = 6,
    Io = 7,
    Panic = 8,
}

/// Parsed scenario, ready to run.
pub struct PlatoonScenario {
    inner: ScenarioConfig,
}

/// Recorded run.
pub struct PlatoonTrajectory {
    inner: Trajectory,
}

/// One vehicle at one grid point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PlatoonSample {
    pub grid: f64,
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub a: f64,
    pub u: f64,
    pub w: f64,
    pub delta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub e1: f64,
    pub e2: f64,
    pub y: f64,
}

/// Feedback gains and closed-loop poles `re ± i·im`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PlatoonGains {
    pub k1: f64,
    pub k2: f64,
    pub eig_re: [f64; 2],
    pub eig_im: [f64; 2],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn core_status(e: &Error) -> PlatoonStatus {
    match e {
        Error::InvalidParameter(_)
        | Error::NotHurwitz { .. }
        | Error::GainNotContractive { .. } => PlatoonStatus::InvalidParameter,
        Error::OutOfRange { .. } => PlatoonStatus::OutOfRange,
        _ => PlatoonStatus::Simulation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PlatoonStatus, String)>) -> PlatoonStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlatoonStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PlatoonStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (PlatoonStatus, String) {
    (core_status(&e), e.to_string())
}

fn null(what: &str) -> (PlatoonStatus, String) {
    (PlatoonStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PlatoonStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (PlatoonStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// Message for the most recent failure on the calling thread, or null.
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn platoon_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn platoon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a TOML configuration into a scenario handle.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn platoon_scenario_from_toml(
    toml: *const c_char,
    out: *mut *mut PlatoonScenario,
) -> PlatoonStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(toml, "toml")?;
        let cfg =
            ConfigFile::from_toml_str(text).map_err(|e| (PlatoonStatus::Config, e.to_string()))?;
        let inner = cfg
            .scenario()
            .map_err(|e| (PlatoonStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(PlatoonScenario { inner }));
        Ok(())
    })
}

/// Override the RNG seed of a scenario.
///
/// # Safety
/// `scenario` must come from [`platoon_scenario_from_toml`].
#[no_mangle]
pub unsafe extern "C" fn platoon_scenario_set_seed(
    scenario: *mut PlatoonScenario,
    seed: u64,
) -> PlatoonStatus {
    guard(|| {
        let sc = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        sc.inner.seed = seed;
        Ok(())
    })
}

/// Number of vehicles, leader included; 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or come from [`platoon_scenario_from_toml`].
#[no_mangle]
pub unsafe extern "C" fn platoon_scenario_vehicles(scenario: *const PlatoonScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.n_vehicles())
}

/// # Safety
/// `scenario` must be null or come from [`platoon_scenario_from_toml`], and
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn platoon_scenario_free(scenario: *mut PlatoonScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Run a scenario in its configured domain.
///
/// # Safety
/// `scenario` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn platoon_run(
    scenario: *const PlatoonScenario,
    out: *mut *mut PlatoonTrajectory,
) -> PlatoonStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sc = &scenario.as_ref().ok_or_else(|| null("scenario"))?.inner;
        let inner = match sc.domain {
            Domain::Spatial => run_spatial(sc),
            Domain::Temporal => run_temporal(sc),
        }
        .map_err(core_err)?;
        *out = Box::into_raw(Box::new(PlatoonTrajectory { inner }));
        Ok(())
    })
}

/// Grid points recorded; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn platoon_trajectory_len(traj: *const PlatoonTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Vehicles recorded; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn platoon_trajectory_vehicles(traj: *const PlatoonTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.vehicles.len())
}

/// Copy grid point `k` of `vehicle` into `out`.
///
/// # Safety
/// `traj` must be a live trajectory handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn platoon_trajectory_sample(
    traj: *const PlatoonTrajectory,
    k: usize,
    vehicle: usize,
    out: *mut PlatoonSample,
) -> PlatoonStatus {
    guard(|| {
        let tr = &traj.as_ref().ok_or_else(|| null("trajectory"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if k >= tr.len() || vehicle >= tr.vehicles.len() {
            return Err((
                PlatoonStatus::OutOfRange,
                format!(
                    "index ({k}, {vehicle}) outside {} x {}",
                    tr.len(),
                    tr.vehicles.len()
                ),
            ));
        }
        let x = tr.vehicles[vehicle].get(k);
        *out = PlatoonSample {
            grid: tr.grid[k],
            t: x.t,
            s: x.s,
            v: x.v,
            a: x.a,
            u: x.u,
            w: x.w,
            delta: x.delta,
            delta0: x.delta0,
            delta1: x.delta1,
            delta2: x.delta2,
            e1: x.e1,
            e2: x.e2,
            y: x.y,
        };
        Ok(())
    })
}

/// Write the trajectory CSV to `path`.
///
/// # Safety
/// `traj` must be a live trajectory handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn platoon_trajectory_write_csv(
    traj: *const PlatoonTrajectory,
    path: *const c_char,
) -> PlatoonStatus {
    guard(|| {
        let tr = &traj.as_ref().ok_or_else(|| null("trajectory"))?.inner;
        let path = read_str(path, "path")?;
        let io = |e: &dyn std::fmt::Display| (PlatoonStatus::Io, format!("{path}: {e}"));
        let file = File::create(path).map_err(|e| io(&e))?;
        tr.write_csv(BufWriter::new(file)).map_err(|e| io(&e))
    })
}

/// # Safety
/// `traj` must be null or a live trajectory handle, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn platoon_trajectory_free(traj: *mut PlatoonTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Pole-placement gains for `(ω₀, ζ₀, κ)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn platoon_make_gains(
    omega0: f64,
    zeta0: f64,
    kappa: f64,
    out: *mut PlatoonGains,
) -> PlatoonStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let g = make_gains(omega0, zeta0, kappa).map_err(core_err)?;
        let [p, q] = g.closed_loop_eigenvalues();
        *out = PlatoonGains {
            k1: g.k1,
            k2: g.k2,
            eig_re: [p.0, q.0],
            eig_im: [p.1, q.1],
        };
        Ok(())
    })
}

/// Uniform bound on `sup |x_i|` over a cascade with the given ISS data.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn platoon_cascade_bound(
    c: f64,
    lambda: f64,
    gamma_bar: f64,
    sigma_bar: f64,
    x0_bound: f64,
    w_bound: f64,
    out: *mut f64,
) -> PlatoonStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = IssBoundSpec::new(c, lambda, gamma_bar, sigma_bar).map_err(core_err)?;
        *out = compose_cascade_bound(&spec, x0_bound, w_bound).map_err(core_err)?;
        Ok(())
    })
}
