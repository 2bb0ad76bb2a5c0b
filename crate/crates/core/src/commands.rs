//! The `simulate`, `compare`, `sweep` and `validate` commands.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use crate::config::ConfigFile;
use crate::error::Error;
use crate::sim::trajectory::Trajectory;
use crate::sim::{run_spatial, run_temporal, Domain, ScenarioConfig};
use crate::spacing::{check_prop1, Policy};
use crate::stability::dss_sweep;
use crate::validate::{run_validation, ValidateOptions};
use crate::vehicle::time_to_space_traj;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("simulation aborted: {0}")]
    Simulation(Error),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Simulation(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub step: Option<f64>,
    pub seed: Option<u64>,
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ConfigFile, CliError> {
    let mut cfg = ConfigFile::load(path).map_err(CliError::Config)?;
    if let Some(step) = overrides.step {
        cfg.sim.step = Some(step);
    }
    if let Some(seed) = overrides.seed {
        cfg.sim.seed = seed;
    }
    Ok(cfg)
}

/// Build-time errors (bad parameters) are config errors; errors raised while
/// integrating are simulation aborts.
fn build<T>(r: crate::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(e.to_string()))
}

fn simulate(r: crate::Result<Trajectory>) -> Result<Trajectory, CliError> {
    r.map_err(|e| match e {
        Error::InvalidParameter(msg) => CliError::Config(msg),
        e => CliError::Simulation(e),
    })
}

fn run(sc: &ScenarioConfig) -> Result<Trajectory, CliError> {
    simulate(match sc.domain {
        Domain::Spatial => run_spatial(sc),
        Domain::Temporal => run_temporal(sc),
    })
}

fn write_outputs(
    dir: &Path,
    traj: &Trajectory,
    cfg: &ConfigFile,
    seconds: f64,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join("trajectory.csv"))?);
    traj.write_csv(&mut out)
        .map_err(|e| CliError::Io(e.to_string()))?;
    out.flush()?;
    let meta = serde_json::json!({
        "toolkit": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.sim.seed,
        "domain": traj.domain,
        "grid_points": traj.len(),
        "vehicles": traj.vehicles.len(),
        "wall_time_s": seconds,
        "config": cfg.to_toml(),
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(dir.join("meta.json"), text + "\n")?;
    Ok(())
}

/// Writes `trajectory.csv` and `meta.json` into `out`.
pub fn cmd_simulate(
    config: &Path,
    out: &Path,
    overrides: &Overrides,
) -> Result<Trajectory, CliError> {
    let cfg = load_config(config, overrides)?;
    let sc = build(cfg.scenario())?;
    let clock = Instant::now();
    let traj = run(&sc)?;
    write_outputs(out, &traj, &cfg, clock.elapsed().as_secs_f64())?;
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub delay_based_prop1: bool,
    pub headway_prop1: bool,
    /// Largest cross-vehicle velocity difference at equal position inside
    /// the reference dip (or the whole range for other profiles).
    pub delay_based_spread: f64,
    pub headway_spread: f64,
}

/// Largest `max_i vᵢ(s) - min_i vᵢ(s)` over grid points with `s ∈ [lo, hi]`.
pub fn velocity_spread(traj: &Trajectory, lo: f64, hi: f64) -> f64 {
    let mut worst = 0.0f64;
    for (k, s) in traj.grid.iter().enumerate() {
        if *s < lo || *s > hi {
            continue;
        }
        let (mn, mx) = traj
            .vehicles
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| {
                (mn.min(v.v[k]), mx.max(v.v[k]))
            });
        worst = worst.max(mx - mn);
    }
    worst
}

/// Runs the delay-based controller in space and the gap-policy controller in
/// time on the same scenario, writing `delay_based/` and `headway/` under `out`.
pub fn cmd_compare(
    config: &Path,
    out: &Path,
    overrides: &Overrides,
) -> Result<CompareSummary, CliError> {
    let cfg = load_config(config, overrides)?;
    let (spatial, temporal) = build(cfg.compare_scenarios())?;
    let clock = Instant::now();
    let delay = run(&spatial)?;
    write_outputs(
        &out.join("delay_based"),
        &delay,
        &cfg,
        clock.elapsed().as_secs_f64(),
    )?;
    let clock = Instant::now();
    let headway = run(&temporal)?;
    write_outputs(
        &out.join("headway"),
        &headway,
        &cfg,
        clock.elapsed().as_secs_f64(),
    )?;

    // Judge both on the spatial grid, after the initial transient.
    let headway_space = simulate(time_to_space_traj(&headway, &spatial.grid))?;
    let (s0, s1) = (spatial.grid.start, spatial.grid.end);
    let settled = s0 + 0.25 * (s1 - s0);
    let dt = match spatial.policy.policy {
        Policy::DelayBased { dt } => dt,
        _ => unreachable!("compare_scenarios builds a delay-based spatial run"),
    };
    let (lo, hi) = match spatial.profile.kind() {
        crate::reference::ProfileKind::CosineDip { start, end, .. } => (start, end),
        _ => (settled, s1),
    };
    let summary = CompareSummary {
        delay_based_prop1: check_prop1(&delay.segment(settled, s1), dt, 1e-3).passes(),
        headway_prop1: check_prop1(&headway_space.segment(settled, s1), dt, 1e-3).passes(),
        delay_based_spread: velocity_spread(&delay, lo, hi),
        headway_spread: velocity_spread(&headway_space, lo, hi),
    };
    let text = format!(
        "delay_based prop1 {}\nheadway prop1 {}\ndelay_based velocity spread {:.6e} m/s\nheadway velocity spread {:.6e} m/s\n",
        pass_fail(summary.delay_based_prop1),
        pass_fail(summary.headway_prop1),
        summary.delay_based_spread,
        summary.headway_spread,
    );
    fs::write(out.join("compare.txt"), &text)?;
    print!("{text}");
    Ok(summary)
}

fn pass_fail(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Writes `sweep.csv` and `summary.txt`.
pub fn cmd_sweep(
    config: &Path,
    out: &Path,
    overrides: &Overrides,
) -> Result<crate::stability::DssReport, CliError> {
    let cfg = load_config(config, overrides)?;
    let base = build(cfg.scenario())?;
    if base.domain != Domain::Spatial {
        return Err(CliError::Config(
            "sweeps run the delay-based policy in the spatial domain".into(),
        ));
    }
    let report = build(dss_sweep(
        &base,
        &cfg.sweep.n_list,
        &cfg.sweep.kappa0_list,
        cfg.sweep.saturation_tol,
    ))?;
    fs::create_dir_all(out)?;
    let mut file = BufWriter::new(File::create(out.join("sweep.csv"))?);
    report
        .write_csv(&mut file)
        .map_err(|e| CliError::Io(e.to_string()))?;
    file.flush()?;
    let summary = report.summary();
    fs::write(out.join("summary.txt"), &summary)?;
    print!("{summary}");
    for c in report.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!(
            "N = {}, kappa0 = {}: {}",
            c.n,
            c.kappa0,
            c.error.as_ref().unwrap()
        );
    }
    Ok(report)
}

/// Prints one line per built-in check; fails if any check fails.
pub fn cmd_validate(opts: &ValidateOptions) -> Result<(), CliError> {
    if let Some(k) = opts.kappa0 {
        if !(0.0..1.0).contains(&k) {
            return Err(CliError::Config(format!(
                "kappa0 must lie in [0, 1), got {k}"
            )));
        }
    }
    let checks = run_validation(opts);
    for c in &checks {
        println!(
            "{} {}: measured {:.3e}, tolerance {:.1e}",
            pass_fail(c.pass),
            c.name,
            c.measured,
            c.tol
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{failed} of {} checks failed",
            checks.len()
        )))
    }
}
