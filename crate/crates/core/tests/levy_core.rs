mod common;

use common::{load, valid_model};
use levy_opt::discrete::{path_rng, sample_log_increment};
use levy_opt::{admissible_set, cumulant_exponent, log_triplet, MarketModel};
use proptest::prelude::*;

proptest! {
    #[test]
    fn cumulant_anchors(m in valid_model()) {
        let log = log_triplet(&m.triplet);
        prop_assert_eq!(cumulant_exponent(&log, 0.0), 0.0);
        let k1 = cumulant_exponent(&log, 1.0);
        let b = m.triplet.drift;
        prop_assert!((k1 - b).abs() <= 1e-12 * b.abs().max(1.0), "κ(1) = {} vs b = {}", k1, b);
    }

    #[test]
    fn cumulant_is_convex(m in valid_model(), u1 in -3.0..3.0f64, du in 0.0..3.0f64, t in 0.0..1.0f64) {
        let log = log_triplet(&m.triplet);
        let u2 = u1 + du;
        let k = |u| cumulant_exponent(&log, u);
        let mid = k(t * u1 + (1.0 - t) * u2);
        prop_assert!(mid <= t * k(u1) + (1.0 - t) * k(u2) + 1e-12);
    }

    #[test]
    fn log_triplet_round_trip(m in valid_model()) {
        let back = log_triplet(&m.triplet).to_levy();
        let t = &m.triplet;
        prop_assert!((back.drift - t.drift).abs() <= 1e-12 * t.drift.abs().max(1.0));
        prop_assert!((back.diffusion - t.diffusion).abs() <= 1e-12 * t.diffusion.max(1.0));
        prop_assert_eq!(back.atoms.len(), t.atoms.len());
        for (a, b) in back.atoms.iter().zip(&t.atoms) {
            prop_assert!((a.size - b.size).abs() <= 1e-12 * b.size.abs().max(1.0));
            prop_assert_eq!(a.intensity, b.intensity);
        }
    }

    #[test]
    fn admissible_set_contains_unit_interval(m in valid_model()) {
        let set = admissible_set(&m.triplet, &m.utility);
        prop_assert!(set.contains(0.0) && set.contains(1.0) && set.contains(0.5));
        prop_assert!(set.contains_interior(0.0));
    }
}

/// Sample mean of `exp(u L̃_t)` against `exp(κ(u) t)`.
fn mc_moment(m: &MarketModel, u: f64, t: f64, samples: u64, seed: u64) -> (f64, f64, f64) {
    let log = log_triplet(&m.triplet);
    let mut rng = path_rng(seed, 0);
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..samples {
        let y = (u * sample_log_increment(&log, t, &mut rng)).exp();
        let d = y - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (y - mean);
    }
    let se = (m2 / (samples - 1) as f64 / samples as f64).sqrt();
    (mean, se, (cumulant_exponent(&log, u) * t).exp())
}

#[test]
fn exponential_moments_match_the_cumulant() {
    let models = [
        load("merton.json"),
        load("two_atom.json"),
        load("high_drift.json"),
        MarketModel::new(
            levy_opt::LevyTriplet::new(
                0.1,
                0.0,
                vec![
                    levy_opt::JumpAtom::new(-0.5, 0.7),
                    levy_opt::JumpAtom::new(0.8, 0.4),
                    levy_opt::JumpAtom::new(0.1, 2.0),
                ],
            ),
            1.0,
            1.0,
            2.0,
        ),
    ];
    for (k, m) in models.iter().enumerate() {
        for (j, u) in [-1.0, 0.5, 2.0].into_iter().enumerate() {
            let (mean, se, want) = mc_moment(m, u, m.horizon, 1_000_000, (10 * k + j) as u64);
            assert!(
                (mean - want).abs() <= 4.0 * se,
                "model {k}, u = {u}: {mean} vs {want} (se {se})"
            );
        }
    }
}
