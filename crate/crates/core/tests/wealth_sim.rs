mod common;

use common::{load, merton, two_atom};
use levy_opt::discrete::path_rng;
use levy_opt::wealth_sim::{CoupledPath, CoupledSimulator};
use levy_opt::{
    cumulant_exponent, l2_terminal_gap, log_triplet, simulate_coupled_terminals, MarketModel,
    McConfig,
};

fn shipped() -> [MarketModel; 2] {
    [load("merton.json"), load("two_atom.json")]
}

#[test]
fn coupling_holds_on_every_path() {
    for m in shipped() {
        for n in [1, 7, 64] {
            let s = simulate_coupled_terminals(&m, 1.0, 1.0, n, &McConfig::new(20_000, 4)).unwrap();
            assert!(s.max_coupling_error <= 1e-10, "{}", s.max_coupling_error);
        }
    }
}

#[test]
fn product_wealth_is_positive_on_the_unit_interval() {
    for m in shipped() {
        for pi in [0.0, 0.3, 0.7, 1.0] {
            let s = simulate_coupled_terminals(&m, pi, pi, 16, &McConfig::new(20_000, 5)).unwrap();
            assert_eq!(s.product_nonpositive, 0, "π = {pi}");
            assert!(s.product.mean > 0.0 && s.exact.mean > 0.0);
        }
    }
}

#[test]
fn exact_wealth_moments_match_the_cumulant() {
    for m in shipped() {
        for pi in [0.5, 1.0] {
            let s = simulate_coupled_terminals(&m, pi, pi, 8, &McConfig::new(200_000, 6)).unwrap();
            let log = log_triplet(&m.triplet.scaled(pi));
            for (q, est) in [(1.0, s.exact), (2.0, s.exact_squared)] {
                let want = (cumulant_exponent(&log, q) * m.horizon).exp();
                assert!(
                    (est.mean - want).abs() <= 4.0 * est.std_error,
                    "π = {pi}, q = {q}: {} vs {want} (se {})",
                    est.mean,
                    est.std_error
                );
            }
        }
    }
}

#[test]
fn zero_strategy_gaps_vanish() {
    let g = l2_terminal_gap(&two_atom(2.0), 0.0, 0.0, 32, &McConfig::new(1000, 0)).unwrap();
    assert_eq!(g.product_vs_exact.mean, 0.0);
    assert_eq!(g.product_vs_euler.mean, 0.0);
    assert_eq!(g.euler_vs_exact.mean, 0.0);
}

#[test]
fn product_gap_shrinks_with_the_grid() {
    for m in shipped() {
        let gaps: Vec<f64> = [4, 16, 64, 256]
            .iter()
            .map(|&n| {
                l2_terminal_gap(&m, 0.5, 0.5, n, &McConfig::new(100_000, 7))
                    .unwrap()
                    .product_vs_exact
                    .mean
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] * 4.0 <= gaps[0], "{gaps:?}");
    }
}

/// `E[(1 + Z)^k]`, `E[Δ]`, `E[Δ²]` over one step of length `dt`, with
/// `Z = e^{ΔL̃} - 1` and `Δ` the matching increment of `L`.
struct StepMoments {
    z1: f64,
    z2: f64,
    d1: f64,
    d2: f64,
}

fn step_moments(m: &MarketModel, dt: f64) -> StepMoments {
    let log = log_triplet(&m.triplet);
    let k1 = (cumulant_exponent(&log, 1.0) * dt).exp();
    let k2 = (cumulant_exponent(&log, 2.0) * dt).exp();
    let t = &m.triplet;
    let var = t.diffusion
        + t.atoms
            .iter()
            .map(|a| a.intensity * a.size * a.size)
            .sum::<f64>();
    let d1 = t.drift * dt;
    StepMoments {
        z1: k1 - 1.0,
        z2: k2 - 2.0 * k1 + 1.0,
        d1,
        d2: var * dt + d1 * d1,
    }
}

/// Upper estimate of `E[(Z - Δ)²]` for one step: sample mean plus four
/// standard errors.
fn step_error(m: &MarketModel, dt: f64, paths: u64) -> f64 {
    let one = MarketModel::new(m.triplet.clone(), dt, m.initial_wealth, m.p());
    let sim = CoupledSimulator::new(&one, 1).unwrap();
    let mut path = CoupledPath::default();
    let (mut s, mut s2) = (0.0, 0.0);
    for i in 0..paths {
        sim.fill_path(&mut path_rng(11, i), 1.0, &mut path);
        let e = (path.log_increments[0].exp_m1() - path.increments[0]).powi(2);
        s += e;
        s2 += e * e;
    }
    let n = paths as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    mean + 4.0 * (var / n).sqrt()
}

/// Discrete Gronwall bound for `E[(X_T - Y_T)²]`, where `X` is the product
/// wealth and `Y` the Euler wealth. Splitting
/// `X_{k+1} - Y_{k+1} = (X_k - Y_k)(1 + πΔ_k) + π X_k ε_k` with
/// `(a + b)² <= (1 + h) a² + (1 + 1/h) b²`, `h = 1/N`, and independence of
/// the step from the past gives `e_{k+1} <= (1 + δ) e_k + η_k` with
/// `δ = (1 + h) E[(1 + πΔ)²] - 1` and `η_k = (1 + N) π² E[X_k²] E[ε²]`.
fn gronwall_envelope(m: &MarketModel, pi: f64, n: usize, eps2: f64) -> f64 {
    let dt = m.horizon / n as f64;
    let s = step_moments(m, dt);
    let h = 1.0 / n as f64;
    let delta = ((1.0 + h) * (1.0 + 2.0 * pi * s.d1 + pi * pi * s.d2) - 1.0).max(0.0);
    let x2 = 1.0 + 2.0 * pi * s.z1 + pi * pi * s.z2;
    let x0 = m.initial_wealth;
    let eta: f64 = (0..n)
        .map(|k| (1.0 + n as f64) * pi * pi * x0 * x0 * x2.powi(k as i32) * eps2)
        .sum();
    eta * (n as f64 * delta).exp()
}

#[test]
fn euler_gap_respects_the_gronwall_envelope() {
    for m in shipped() {
        for n in [4, 16, 64] {
            let eps2 = step_error(&m, m.horizon / n as f64, 200_000);
            for pi in [0.25, 0.5, 0.75, 1.0] {
                let gap = l2_terminal_gap(&m, pi, pi, n, &McConfig::new(50_000, 8))
                    .unwrap()
                    .product_vs_euler;
                let bound = gronwall_envelope(&m, pi, n, eps2);
                assert!(gap.mean.is_finite() && gap.mean >= 0.0);
                assert!(
                    gap.mean - 4.0 * gap.std_error <= bound,
                    "N = {n}, π = {pi}: gap {} > envelope {bound}",
                    gap.mean
                );
            }
        }
    }
}

#[test]
fn euler_gap_is_stable_in_the_strategy() {
    for m in shipped() {
        for n in [8, 128] {
            let gaps: Vec<f64> = (0..=10)
                .map(|k| {
                    l2_terminal_gap(&m, k as f64 / 10.0, 0.5, n, &McConfig::new(20_000, 9))
                        .unwrap()
                        .product_vs_euler
                        .mean
                })
                .collect();
            assert!(gaps.iter().all(|g| g.is_finite() && *g >= 0.0), "{gaps:?}");
            // the gap grows like π² E[ε²]-type terms, so it is largest at π = 1
            let top = gaps[10];
            assert!(gaps.iter().all(|g| *g <= top * (1.0 + 1e-9)), "{gaps:?}");
        }
    }
}

#[test]
fn drift_only_gap_is_deterministic() {
    // vanishing diffusion stands in for the excluded pure-drift model
    let m = MarketModel::new(
        levy_opt::LevyTriplet::new(0.1, 1e-300, vec![]),
        1.0,
        1.0,
        2.0,
    );
    let g = l2_terminal_gap(&m, 1.0, 1.0, 10, &McConfig::new(100, 0)).unwrap();
    // π = 1: the product wealth is the stock, identical to the exact wealth
    assert!(g.product_vs_exact.mean <= 1e-28);
    let euler = (0.1f64.exp() - 1.01f64.powi(10)).powi(2);
    assert!((g.euler_vs_exact.mean - euler).abs() <= 1e-12 * euler);
}

#[test]
fn negative_drift_keeps_wealth_positive() {
    let m = merton(-0.02, 2.0);
    let s = simulate_coupled_terminals(&m, 0.5, 0.5, 16, &McConfig::new(10_000, 1)).unwrap();
    assert_eq!(s.product_nonpositive, 0);
    assert!(s.gaps.product_vs_exact.mean.is_finite());
}
