use platoon_core::config::ConfigFile;
use platoon_core::sim::{integrate_rk4, AppliesTo, DisturbanceSpec, ScenarioConfig, UniformGrid};
use platoon_core::spacing::{Policy, PolicyParams};
use platoon_core::stability::{
    check_l2_contraction, compose_cascade_bound, dss_sweep, simulate_linear_cascade,
    simulate_reduced_chain, simulate_scaled_cascade, IssBoundSpec,
};
use platoon_core::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// `ẋᵢ = -λxᵢ + γxᵢ₋₁ + wᵢ` is ISS with `C = 1`, `γ̄ = γ/λ`, `σ̄ = 1/λ`;
    /// the composed bound must dominate every simulated state.
    #[test]
    fn composed_bound_dominates_simulation(
        lambda in 0.5f64..2.0,
        ratio in 0.0f64..0.95,
        n in 1usize..=200,
        x0 in 0.0f64..2.0,
        w in 0.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let gamma = ratio * lambda;
        let spec = IssBoundSpec::new(1.0, lambda, ratio, 1.0 / lambda).unwrap();
        let bound = compose_cascade_bound(&spec, x0, w).unwrap();
        let mut x = vec![0.0; n + 1];
        let mut state = seed;
        for xi in &mut x {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *xi = x0 * (2.0 * ((state >> 11) as f64 / (1u64 << 53) as f64) - 1.0);
        }
        let phase = (seed % 97) as f64;
        let run = simulate_scaled_cascade(
            lambda, gamma, n,
            |i, t| w * (0.3 * t + i as f64 + phase).sin(),
            &x, 10.0 / lambda, 0.05 / lambda,
        ).unwrap();
        let worst = run.sup_norms.iter().copied().fold(0.0, f64::max);
        prop_assert!(worst <= bound * (1.0 + 1e-9) + 1e-12, "{worst} > {bound}");
    }
}

#[test]
fn expansive_cascade_grows_geometrically() {
    let run = simulate_linear_cascade(2.0, 10, |_, _| 1.0, &[0.0; 11], 60.0, 0.05).unwrap();
    // Steady state xᵢ = 2^(i+1) - 1.
    for (i, x) in run.final_state.iter().enumerate() {
        let expect = 2f64.powi(i as i32 + 1) - 1.0;
        assert!((x - expect).abs() / expect < 1e-6, "{i}: {x} vs {expect}");
    }
    assert!(
        compose_cascade_bound(&IssBoundSpec::new(1.0, 1.0, 2.0, 1.0).unwrap(), 0.0, 1.0).is_err()
    );
}

#[test]
fn contractive_cascade_approaches_geometric_limit() {
    let run = simulate_linear_cascade(0.5, 30, |_, _| 1.0, &[0.0; 31], 80.0, 0.05).unwrap();
    let bound =
        compose_cascade_bound(&IssBoundSpec::new(1.0, 1.0, 0.5, 1.0).unwrap(), 0.0, 1.0).unwrap();
    assert_eq!(bound, 2.0);
    for (i, x) in run.final_state.iter().enumerate() {
        let expect = 2.0 * (1.0 - 0.5f64.powi(i as i32 + 1));
        assert!((x - expect).abs() < 1e-6);
        assert!(*x < bound);
    }
}

#[test]
fn undisturbed_cascade_at_rest_stays_at_rest() {
    let run = simulate_linear_cascade(0.9, 50, |_, _| 0.0, &[0.0; 51], 20.0, 0.1).unwrap();
    assert!(run.sup_norms.iter().all(|x| *x == 0.0));
}

fn chain(kappa0: f64, n: usize) -> platoon_core::stability::ReducedChain {
    let policy = PolicyParams::new(Policy::DelayBased { dt: 1.0 }, 2.0, kappa0).unwrap();
    let mut initial = vec![0.0; n + 1];
    initial[0] = 1.0;
    simulate_reduced_chain(
        n,
        &policy,
        &initial,
        &UniformGrid::new(0.0, 200.0, 0.05).unwrap(),
    )
    .unwrap()
}

/// Contraction holds on every prefix `[0, s]`, not only at the end.
#[test]
fn l2_contraction_on_every_prefix() {
    for kappa0 in [0.0, 0.05, 0.3, 0.7, 0.95] {
        let report = check_l2_contraction(&chain(kappa0, 8), kappa0).unwrap();
        assert!(report.holds(), "κ₀ = {kappa0}: {report:?}");
        assert!(report.worst_intermediate <= report.bound + report.tol);
        assert!(report.energies.windows(2).all(|p| p[1] <= p[0] + 1e-12));
    }
}

/// `Δ₀ = e^{-s/κ}` gives `Δᵢ = (1-κ₀)ⁱ (s/κ)ⁱ/i! e^{-s/κ}`, whose energy
/// ratios are `(1-κ₀)² (2i-1)/(2i)`: they climb towards the bound.
#[test]
fn l2_ratios_for_decaying_leader() {
    let report = check_l2_contraction(&chain(0.2, 3), 0.2).unwrap();
    for (i, r) in report.ratios.iter().enumerate() {
        let m = (i + 1) as f64;
        let exact = report.bound * (2.0 * m - 1.0) / (2.0 * m);
        assert!((r - exact).abs() < 1e-4, "{:?}", report.ratios);
    }
}

#[test]
fn l2_rejects_nonzero_follower_start() {
    let policy = PolicyParams::new(Policy::DelayBased { dt: 1.0 }, 2.0, 0.1).unwrap();
    let grid = UniformGrid::new(0.0, 10.0, 0.1).unwrap();
    let c = simulate_reduced_chain(2, &policy, &[1.0, 0.0, 0.5], &grid).unwrap();
    assert!(matches!(
        check_l2_contraction(&c, 0.1),
        Err(Error::HypothesisViolated { vehicle: 2, .. })
    ));
}

fn small_sweep_base() -> ScenarioConfig {
    let mut cfg = ConfigFile::default();
    cfg.sim.s_end = 400.0;
    let mut base = cfg.scenario().unwrap();
    base.disturbance = DisturbanceSpec::sine(1.0, 0.01, AppliesTo::Followers);
    base
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let base = small_sweep_base();
    let sweep = || dss_sweep(&base, &[2, 6], &[0.0, 0.2], 0.05).unwrap();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(sweep);
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(sweep);
    assert_eq!(serial, parallel);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    serial.write_csv(&mut a).unwrap();
    parallel.write_csv(&mut b).unwrap();
    assert_eq!(a, b);
}

/// More leader weight never worsens the worst follower timing error.
#[test]
fn leader_weight_orders_sup_norms() {
    let kappa0s = [0.0, 0.1, 0.3, 0.6];
    let report = dss_sweep(&small_sweep_base(), &[4, 12], &kappa0s, 0.05).unwrap();
    for n in [4, 12] {
        let row: Vec<f64> = kappa0s
            .iter()
            .map(|k| report.cell(n, *k).unwrap().sup_e1)
            .collect();
        assert!(row.windows(2).all(|p| p[1] <= p[0]), "N = {n}: {row:?}");
    }
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// `exp(A)` by scaling and squaring a truncated Taylor series.
fn expm(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let norm = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = norm.log2().ceil().max(0.0) as i32 + 4;
    let scale = 2f64.powi(-squarings);
    let scaled = a.map(|r| r.map(|x| x * scale));
    let mut term = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut sum = term;
    for k in 1..=20 {
        term = mat_mul(&term, &scaled).map(|r| r.map(|x| x / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

#[test]
fn rk4_matches_matrix_exponential() {
    let a = [[-0.5, 1.0, 0.0], [-1.0, -0.5, 0.3], [0.2, 0.0, -1.2]];
    let x0 = [1.0, -0.5, 2.0];
    let horizon = 5.0;
    let grid = UniformGrid::new(0.0, horizon, 0.005).unwrap();
    let states = integrate_rk4(
        |_, x, dx| {
            for i in 0..3 {
                dx[i] = (0..3).map(|j| a[i][j] * x[j]).sum();
            }
            Ok(())
        },
        &x0,
        &grid,
    )
    .unwrap();
    let e = expm(&a.map(|r| r.map(|x| x * horizon)));
    let last = states.last().unwrap();
    for i in 0..3 {
        let exact: f64 = (0..3).map(|j| e[i][j] * x0[j]).sum();
        assert!(
            (last[i] - exact).abs() < 1e-8,
            "{i}: {} vs {exact}",
            last[i]
        );
    }
}
