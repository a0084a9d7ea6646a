mod common;

use common::{central_difference, valid_model};
use levy_opt::{admissible_set, cumulant_exponent, eval_g, eval_g_prime, log_triplet, MarketModel};
use proptest::prelude::*;

/// Maps `s ∈ [0, 1]` into the middle 80% of the admissible set, cut to
/// `[-5, 5]`.
fn interior_point(m: &MarketModel, s: f64) -> f64 {
    let set = admissible_set(&m.triplet, &m.utility);
    let lo = set.lower.max(-5.0);
    let hi = set.upper.min(5.0);
    let pad = 0.1 * (hi - lo);
    lo + pad + s * (hi - lo - 2.0 * pad)
}

proptest! {
    #[test]
    fn cumulant_identity(m in valid_model(), s in 0.0..1.0f64) {
        let pi = interior_point(&m, s);
        let g = eval_g(&m, pi).unwrap().value;
        let p = m.p();
        let scaled = log_triplet(&m.triplet.scaled(pi));
        if p == 1.0 {
            prop_assert!((g - scaled.drift).abs() <= 1e-10 * g.abs().max(1.0));
        } else {
            let lhs = (1.0 - p) * g;
            let rhs = cumulant_exponent(&scaled, 1.0 - p);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn log_utility_identity(m in valid_model(), s in 0.0..1.0f64) {
        let m = m.with_p(1.0);
        let pi = interior_point(&m, s);
        let g = eval_g(&m, pi).unwrap().value;
        let drift = log_triplet(&m.triplet.scaled(pi)).drift;
        prop_assert!((g - drift).abs() <= 1e-10 * g.abs().max(1.0));
    }

    #[test]
    fn g_is_concave(m in valid_model(), a in 0.0..1.0f64, b in 0.0..1.0f64, t in 0.0..1.0f64) {
        let (p1, p2) = (interior_point(&m, a.min(b)), interior_point(&m, a.max(b)));
        let g = |pi| eval_g(&m, pi).unwrap().value;
        let mid = g(t * p1 + (1.0 - t) * p2);
        prop_assert!(mid >= t * g(p1) + (1.0 - t) * g(p2) - 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference(m in valid_model()) {
        let g = |pi| eval_g(&m, pi).unwrap().value;
        for k in 0..=8 {
            let pi = interior_point(&m, k as f64 / 8.0);
            let d = eval_g_prime(&m, pi).unwrap();
            let fd = central_difference(g, pi, 1e-6);
            prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "π = {}: {} vs {}", pi, d, fd);
        }
    }

    #[test]
    fn zero_strategy_is_exactly_zero(m in valid_model()) {
        prop_assert_eq!(eval_g(&m, 0.0).unwrap().value, 0.0);
    }
}
