mod common;

use common::valid_model;
use levy_opt::optimizer::DERIVATIVE_TOL;
use levy_opt::{admissible_set, eval_g, optimal_continuous, Boundary, Constraint};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn argmax_is_a_local_maximum(m in valid_model()) {
        let r = optimal_continuous(&m, Constraint::Unconstrained).unwrap();
        let set = admissible_set(&m.triplet, &m.utility);
        if r.boundary == Boundary::Interior {
            prop_assert!(r.derivative.abs() <= DERIVATIVE_TOL);
        }
        for pi in [r.argmax - 1e-6, r.argmax + 1e-6] {
            if set.contains(pi) {
                prop_assert!(r.value >= eval_g(&m, pi).unwrap().value);
            }
        }
    }

    #[test]
    fn constrained_is_clipped_unconstrained(m in valid_model()) {
        let free = optimal_continuous(&m, Constraint::Unconstrained).unwrap().argmax;
        let unit = optimal_continuous(&m, Constraint::UnitInterval).unwrap().argmax;
        let clipped = free.clamp(0.0, 1.0);
        prop_assert!((unit - clipped).abs() <= 1e-8, "{} vs clip({})", unit, free);
    }

    #[test]
    fn argmax_does_not_depend_on_initial_wealth(m in valid_model(), x0 in 0.01..100.0f64) {
        let mut other = m.clone();
        other.initial_wealth = x0;
        for c in [Constraint::Unconstrained, Constraint::UnitInterval] {
            let a = optimal_continuous(&m, c).unwrap();
            let b = optimal_continuous(&other, c).unwrap();
            prop_assert_eq!(a.argmax, b.argmax);
        }
    }
}
