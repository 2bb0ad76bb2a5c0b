//! Empirical string-stability checks: the uniform ISS cascade bound for the
//! exponential class, the reduced timing-error chain on the invariant set and
//! its L₂ contraction, and sweeps over platoon length and leader weight.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{ensure, Error, Result};
use crate::sim::rk4::{Rk4, UniformGrid};
use crate::sim::scenario::ScenarioConfig;
use crate::sim::spatial::run_spatial_observed;
use crate::sim::trajectory::format_sig;
use crate::spacing::PolicyParams;

/// ISS estimate `|xᵢ(t)| ≤ C|xᵢ(0)|e^(-λt) + γ̄‖xᵢ₋₁‖∞ + σ̄‖wᵢ‖∞` shared by
/// every subsystem of a cascade.
///
/// For exponential `β` the class condition on `β` holds for any `C ≥ 1`,
/// `λ > 0`, so only the parameter ranges are checked here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IssBoundSpec {
    pub c: f64,
    pub lambda: f64,
    pub gamma_bar: f64,
    pub sigma_bar: f64,
}

impl IssBoundSpec {
    pub fn new(c: f64, lambda: f64, gamma_bar: f64, sigma_bar: f64) -> Result<Self> {
        ensure(c >= 1.0 && c.is_finite(), || {
            format!("C must be >= 1, got {c}")
        })?;
        ensure(lambda > 0.0 && lambda.is_finite(), || {
            format!("lambda must be > 0, got {lambda}")
        })?;
        ensure(gamma_bar >= 0.0, || {
            format!("gamma_bar must be >= 0, got {gamma_bar}")
        })?;
        ensure(sigma_bar >= 0.0 && sigma_bar.is_finite(), || {
            format!("sigma_bar must be >= 0, got {sigma_bar}")
        })?;
        Ok(Self {
            c,
            lambda,
            gamma_bar,
            sigma_bar,
        })
    }
}

/// Length-independent bound `(C x0 + σ̄ w) / (1 - γ̄)` on every subsystem's
/// state: the per-stage gains sum as a geometric series.
pub fn compose_cascade_bound(spec: &IssBoundSpec, x0_bound: f64, w_bound: f64) -> Result<f64> {
    if !(spec.gamma_bar < 1.0) {
        return Err(Error::GainNotContractive {
            gamma_bar: spec.gamma_bar,
        });
    }
    ensure(x0_bound >= 0.0 && w_bound >= 0.0, || {
        "bounds must be non-negative".into()
    })?;
    Ok((spec.c * x0_bound + spec.sigma_bar * w_bound) / (1.0 - spec.gamma_bar))
}

/// Result of integrating `ẋᵢ = -λxᵢ + γxᵢ₋₁ + wᵢ(t)`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeRun {
    /// `‖xᵢ‖∞` over the horizon.
    pub sup_norms: Vec<f64>,
    pub final_state: Vec<f64>,
}

/// The unit-rate linear cascade `ẋᵢ = -xᵢ + γxᵢ₋₁ + wᵢ(t)`.
pub fn simulate_linear_cascade(
    gamma: f64,
    n: usize,
    w: impl Fn(usize, f64) -> f64,
    x0: &[f64],
    horizon: f64,
    step: f64,
) -> Result<CascadeRun> {
    simulate_scaled_cascade(1.0, gamma, n, w, x0, horizon, step)
}

/// Cascade of `n + 1` scalar systems `ẋᵢ = -λxᵢ + γxᵢ₋₁ + wᵢ(t)` (no
/// predecessor term for `i = 0`), RK4 at fixed `step`.
pub fn simulate_scaled_cascade(
    lambda: f64,
    gamma: f64,
    n: usize,
    w: impl Fn(usize, f64) -> f64,
    x0: &[f64],
    horizon: f64,
    step: f64,
) -> Result<CascadeRun> {
    ensure(x0.len() == n + 1, || {
        format!("need {} initial states, got {}", n + 1, x0.len())
    })?;
    let grid = UniformGrid::new(0.0, horizon, step)?;
    let mut state = x0.to_vec();
    let mut sup: Vec<f64> = state.iter().map(|x| x.abs()).collect();
    let mut rk4 = Rk4::new(state.len());
    let mut field = |t: f64, x: &[f64], dx: &mut [f64]| {
        for i in 0..x.len() {
            let coupling = if i == 0 { 0.0 } else { gamma * x[i - 1] };
            dx[i] = -lambda * x[i] + coupling + w(i, t);
        }
        Ok(())
    };
    for k in 0..grid.steps() {
        rk4.step(&mut field, grid.point(k), grid.step, &mut state)?;
        for (m, x) in sup.iter_mut().zip(&state) {
            *m = m.max(x.abs());
        }
    }
    Ok(CascadeRun {
        sup_norms: sup,
        final_state: state,
    })
}

/// Timing errors of the reduced chain `κΔ₀' = -Δ₀`,
/// `κΔᵢ' = -Δᵢ + (1-κ₀)Δᵢ₋₁`, the platoon dynamics on `δ ≡ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedChain {
    pub kappa0: f64,
    pub grid: Vec<f64>,
    /// `deltas[i][k]` is `Δᵢ` at `grid[k]`.
    pub deltas: Vec<Vec<f64>>,
}

pub fn simulate_reduced_chain(
    n_followers: usize,
    policy: &PolicyParams,
    initial: &[f64],
    grid: &UniformGrid,
) -> Result<ReducedChain> {
    ensure(initial.len() == n_followers + 1, || {
        format!(
            "need {} initial timing errors, got {}",
            n_followers + 1,
            initial.len()
        )
    })?;
    let (kappa, kappa0) = (policy.kappa, policy.kappa0);
    let mut deltas: Vec<Vec<f64>> = initial
        .iter()
        .map(|&x| {
            let mut v = Vec::with_capacity(grid.len());
            v.push(x);
            v
        })
        .collect();
    let mut state = initial.to_vec();
    let mut rk4 = Rk4::new(state.len());
    let mut field = |_: f64, x: &[f64], dx: &mut [f64]| {
        dx[0] = -x[0] / kappa;
        for i in 1..x.len() {
            dx[i] = (-x[i] + (1.0 - kappa0) * x[i - 1]) / kappa;
        }
        Ok(())
    };
    for k in 0..grid.steps() {
        rk4.step(&mut field, grid.point(k), grid.step, &mut state)?;
        for (series, x) in deltas.iter_mut().zip(&state) {
            series.push(*x);
        }
    }
    Ok(ReducedChain {
        kappa0,
        grid: grid.points().collect(),
        deltas,
    })
}

/// Per-vehicle L₂ energies of a reduced-chain run and their ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Report {
    pub kappa0: f64,
    /// `(1-κ₀)²`.
    pub bound: f64,
    pub tol: f64,
    /// `∫₀ˢ |Δᵢ|²` at the final position.
    pub energies: Vec<f64>,
    /// `ratios[i-1] = energies[i] / energies[i-1]`; exactly `0.0` when both
    /// energies vanish.
    pub ratios: Vec<f64>,
    /// Largest ratio over vehicles and the intermediate checkpoints.
    pub worst_intermediate: f64,
}

impl L2Report {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.max_ratio() <= self.bound + self.tol
            && self.worst_intermediate <= self.bound + self.tol
    }
}

fn energy_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Trapezoidal L₂ energies of every `Δᵢ` and the ratios between successive
/// vehicles, also checked on 100 intermediate positions.
pub fn check_l2_contraction(chain: &ReducedChain, kappa0: f64) -> Result<L2Report> {
    for (i, series) in chain.deltas.iter().enumerate().skip(1) {
        if series[0] != 0.0 {
            return Err(Error::HypothesisViolated {
                vehicle: i,
                value: series[0],
            });
        }
    }
    let len = chain.grid.len();
    let checkpoints: Vec<usize> = (1..=100)
        .map(|j| (j * (len - 1)) / 100)
        .filter(|&k| k > 0)
        .collect();
    // Cumulative energies at each checkpoint, per vehicle.
    let cumulative: Vec<Vec<f64>> = chain
        .deltas
        .iter()
        .map(|d| {
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(checkpoints.len());
            let mut next = checkpoints.iter().peekable();
            for k in 1..len {
                let h = chain.grid[k] - chain.grid[k - 1];
                acc += 0.5 * h * (d[k - 1] * d[k - 1] + d[k] * d[k]);
                while next.peek() == Some(&&k) {
                    out.push(acc);
                    next.next();
                }
            }
            out
        })
        .collect();
    let energies: Vec<f64> = cumulative
        .iter()
        .map(|c| *c.last().unwrap_or(&0.0))
        .collect();
    let ratios = energies
        .windows(2)
        .map(|p| energy_ratio(p[1], p[0]))
        .collect();
    let mut worst = 0.0f64;
    for pair in cumulative.windows(2) {
        for (num, den) in pair[1].iter().zip(&pair[0]) {
            worst = worst.max(energy_ratio(*num, *den));
        }
    }
    Ok(L2Report {
        kappa0,
        bound: (1.0 - kappa0) * (1.0 - kappa0),
        tol: 1e-6,
        energies,
        ratios,
        worst_intermediate: worst,
    })
}

/// One `(N, κ₀)` run of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DssCell {
    pub n: usize,
    pub kappa0: f64,
    /// `sup_i ‖e₁,ᵢ‖∞`, NaN if the run failed.
    pub sup_e1: f64,
    /// `sup_i ‖Δᵢ‖∞`, NaN if the run failed.
    pub sup_delta: f64,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DssVerdict {
    pub kappa0: f64,
    /// Least-squares slope of `log sup_e1` against `log N`.
    pub growth_exponent: f64,
    /// Relative change of `sup_e1` between the two largest `N`.
    pub relative_increase: f64,
    pub saturates: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DssReport {
    pub n_list: Vec<usize>,
    pub kappa0_list: Vec<f64>,
    /// Row-major over `kappa0_list`, then `n_list`.
    pub cells: Vec<DssCell>,
    pub verdicts: Vec<DssVerdict>,
    pub saturation_tol: f64,
}

pub const SWEEP_HEADER: &str = "N,kappa0,sup_e1_inf,sup_Delta_inf,verdict";

impl DssReport {
    pub fn cell(&self, n: usize, kappa0: f64) -> Option<&DssCell> {
        self.cells.iter().find(|c| c.n == n && c.kappa0 == kappa0)
    }

    pub fn verdict(&self, kappa0: f64) -> Option<&DssVerdict> {
        self.verdicts.iter().find(|v| v.kappa0 == kappa0)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(SWEEP_HEADER.split(','))?;
        for c in &self.cells {
            let verdict = match (&c.error, self.verdict(c.kappa0)) {
                (Some(_), _) => "ERROR",
                (None, Some(v)) if v.saturates => "PASS",
                _ => "FAIL",
            };
            w.write_record([
                c.n.to_string(),
                format_sig(c.kappa0),
                format_sig(c.sup_e1),
                format_sig(c.sup_delta),
                verdict.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Plain-text summary, one line per leader weight.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for v in &self.verdicts {
            s.push_str(&format!(
                "kappa0 = {}: increase {:.2}% between the two largest N, growth exponent {:.3}, {}\n",
                v.kappa0,
                100.0 * v.relative_increase,
                v.growth_exponent,
                if v.saturates { "saturates" } else { "grows" }
            ));
        }
        s
    }
}

/// Sup norms of one spatial run, accumulated without storing the trajectory.
pub fn sup_norms(cfg: &ScenarioConfig) -> Result<(f64, f64)> {
    let (mut e1, mut delta) = (0.0f64, 0.0f64);
    run_spatial_observed(cfg, |_, samples| {
        for x in samples {
            e1 = e1.max(x.e1.abs());
            delta = delta.max(x.delta.abs());
        }
    })?;
    Ok((e1, delta))
}

/// Runs `base` for every platoon length and leader weight in parallel.
///
/// A leader weight passes when `sup_e1` grows by less than `saturation_tol`
/// (relative) between the two largest `N`.
pub fn dss_sweep(
    base: &ScenarioConfig,
    n_list: &[usize],
    kappa0_list: &[f64],
    saturation_tol: f64,
) -> Result<DssReport> {
    ensure(!n_list.is_empty() && !kappa0_list.is_empty(), || {
        "sweep lists must be non-empty".into()
    })?;
    let mut n_sorted = n_list.to_vec();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let jobs: Vec<(f64, usize)> = kappa0_list
        .iter()
        .flat_map(|&k0| n_sorted.iter().map(move |&n| (k0, n)))
        .collect();
    let cells: Vec<DssCell> =
        jobs.par_iter()
            .map(|&(kappa0, n)| {
                let run = PolicyParams::new(base.policy.policy, base.policy.kappa, kappa0)
                    .and_then(|policy| {
                        let cfg = ScenarioConfig {
                            n_followers: n,
                            policy,
                            ..base.clone()
                        };
                        sup_norms(&cfg)
                    });
                match run {
                    Ok((sup_e1, sup_delta)) => DssCell {
                        n,
                        kappa0,
                        sup_e1,
                        sup_delta,
                        error: None,
                    },
                    Err(e) => DssCell {
                        n,
                        kappa0,
                        sup_e1: f64::NAN,
                        sup_delta: f64::NAN,
                        error: Some(e),
                    },
                }
            })
            .collect();
    let verdicts = kappa0_list
        .iter()
        .map(|&kappa0| {
            let row: Vec<&DssCell> = cells.iter().filter(|c| c.kappa0 == kappa0).collect();
            let relative_increase = match row.len() {
                0 | 1 => 0.0,
                m => (row[m - 1].sup_e1 - row[m - 2].sup_e1) / row[m - 2].sup_e1,
            };
            let failed = row.iter().any(|c| c.error.is_some());
            DssVerdict {
                kappa0,
                growth_exponent: log_log_slope(&row),
                relative_increase,
                saturates: !failed && relative_increase < saturation_tol,
            }
        })
        .collect();
    Ok(DssReport {
        n_list: n_sorted,
        kappa0_list: kappa0_list.to_vec(),
        cells,
        verdicts,
        saturation_tol,
    })
}

fn log_log_slope(row: &[&DssCell]) -> f64 {
    let pts: Vec<(f64, f64)> = row
        .iter()
        .filter(|c| c.sup_e1 > 0.0)
        .map(|c| ((c.n as f64).ln(), c.sup_e1.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    sxy / sxx
}
