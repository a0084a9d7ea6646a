//! Continuous-time objective `g` whose maximizer is the optimal constant
//! strategy, and its derivative.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{admissible_set, MarketModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveValue {
    pub value: f64,
    pub finite: bool,
}

impl ObjectiveValue {
    fn new(value: f64) -> Self {
        Self {
            value,
            finite: value.is_finite(),
        }
    }
}

/// `((1+z)^(1-p) - 1)/(1-p)`, or `log(1+z)` at `p = 1`.
///
/// At `z = -1` this is `-1/(1-p)` for `p < 1` and `-∞` for `p >= 1`.
#[inline]
pub(crate) fn power_gain(z: f64, p: f64) -> f64 {
    if p == 1.0 {
        z.ln_1p()
    } else {
        ((1.0 - p) * z.ln_1p()).exp_m1() / (1.0 - p)
    }
}

/// `log(1 + π(e^x - 1))`, the log gross return of strategy `π` on a period
/// with log-return `x`. Exact at `π = 0` and `π = 1`, where `e^x - 1` alone
/// would round to `-1` for very negative `x`.
#[inline]
pub(crate) fn log_gross_return(x: f64, pi: f64) -> f64 {
    if pi == 0.0 {
        0.0
    } else if pi == 1.0 {
        x
    } else {
        (pi * x.exp_m1()).ln_1p()
    }
}

/// [`power_gain`] in terms of `l = log(1+z)`.
#[inline]
pub(crate) fn power_gain_log(l: f64, p: f64) -> f64 {
    if p == 1.0 {
        l
    } else {
        ((1.0 - p) * l).exp_m1() / (1.0 - p)
    }
}

/// `(1+z)^(-p)`.
#[inline]
pub(crate) fn marginal(z: f64, p: f64) -> f64 {
    (-p * z.ln_1p()).exp()
}

pub(crate) fn g_raw(model: &MarketModel, pi: f64) -> f64 {
    let t = &model.triplet;
    let p = model.p();
    let jumps: f64 = t
        .atoms
        .iter()
        .map(|a| {
            let z = pi * a.size;
            a.intensity * (power_gain(z, p) - z)
        })
        .sum();
    pi * t.drift - 0.5 * p * pi * pi * t.diffusion + jumps
}

pub(crate) fn g_prime_raw(model: &MarketModel, pi: f64) -> f64 {
    let t = &model.triplet;
    let p = model.p();
    let jumps: f64 = t
        .atoms
        .iter()
        .map(|a| a.intensity * a.size * (marginal(pi * a.size, p) - 1.0))
        .sum();
    t.drift - p * pi * t.diffusion + jumps
}

/// Evaluates `g(π) = πb - pπ²c/2 + Σ λ_i [((1+πx_i)^(1-p) - 1)/(1-p) - πx_i]`
/// (log form at `p = 1`) on the closure of the admissible set.
pub fn eval_g(model: &MarketModel, pi: f64) -> Result<ObjectiveValue> {
    model.ensure_valid()?;
    let set = admissible_set(&model.triplet, &model.utility);
    if !(pi >= set.lower && pi <= set.upper) {
        return Err(Error::domain(pi, format!("closure of {set}")));
    }
    Ok(ObjectiveValue::new(g_raw(model, pi)))
}

/// `g'(π) = b - pπc + Σ λ_i [x_i (1+πx_i)^(-p) - x_i]`, strictly inside the
/// admissible set.
pub fn eval_g_prime(model: &MarketModel, pi: f64) -> Result<f64> {
    model.ensure_valid()?;
    let set = admissible_set(&model.triplet, &model.utility);
    if !set.contains_interior(pi) {
        return Err(Error::domain(pi, format!("interior of {set}")));
    }
    Ok(g_prime_raw(model, pi))
}

/// Expected utility of terminal wealth under the constant strategy `π`:
/// `x0^(1-p)/(1-p) · exp((1-p) g(π) T)`, or `log x0 + g(π) T` at `p = 1`.
pub fn continuous_value(model: &MarketModel, pi: f64) -> Result<f64> {
    let g = eval_g(model, pi)?.value;
    Ok(value_from_rate(model, g))
}

pub(crate) fn value_from_rate(model: &MarketModel, g: f64) -> f64 {
    let p = model.p();
    let x0 = model.initial_wealth;
    if p == 1.0 {
        x0.ln() + g * model.horizon
    } else {
        x0.powf(1.0 - p) / (1.0 - p) * ((1.0 - p) * g * model.horizon).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpAtom, LevyTriplet};
    use approx::assert_relative_eq;

    fn merton(b: f64, p: f64) -> MarketModel {
        MarketModel::new(LevyTriplet::new(b, 0.04, vec![]), 1.0, 1.0, p)
    }

    fn two_atom(p: f64) -> MarketModel {
        MarketModel::new(
            LevyTriplet::new(
                0.05,
                0.01,
                vec![JumpAtom::new(-0.2, 1.0), JumpAtom::new(0.25, 1.0)],
            ),
            1.0,
            1.0,
            p,
        )
    }

    #[test]
    fn merton_value() {
        let v = eval_g(&merton(0.04, 2.0), 0.5).unwrap();
        assert_relative_eq!(v.value, 0.01, max_relative = 1e-14);
        assert!(v.finite);
    }

    #[test]
    fn zero_strategy_is_zero() {
        for p in [0.5, 1.0, 2.0, 4.0] {
            assert_eq!(eval_g(&two_atom(p), 0.0).unwrap().value, 0.0);
            assert_eq!(eval_g(&merton(0.04, p), 0.0).unwrap().value, 0.0);
        }
    }

    #[test]
    fn two_atom_value_at_one() {
        let v = eval_g(&two_atom(2.0), 1.0).unwrap().value;
        assert_relative_eq!(v, -0.06, max_relative = 1e-13);
    }

    #[test]
    fn derivative_anchors() {
        assert!(eval_g_prime(&merton(0.04, 2.0), 0.5).unwrap().abs() < 1e-17);
        assert_eq!(eval_g_prime(&two_atom(2.0), 0.0).unwrap(), 0.05);
        // 0.04 - 0.2(1/0.81 - 1) + 0.25(1/1.265625 - 1), exact rational -0.0593827160...
        assert_relative_eq!(
            eval_g_prime(&two_atom(2.0), 0.5).unwrap(),
            -0.059_382_716_049_382_716,
            max_relative = 1e-13
        );
    }

    #[test]
    fn log_utility_uses_quadratic_diffusion_term() {
        let m = merton(0.04, 1.0);
        // πb - π²c/2 at π = 1
        assert_relative_eq!(eval_g(&m, 1.0).unwrap().value, 0.02, max_relative = 1e-14);
    }

    #[test]
    fn endpoints() {
        // p >= 1: closure endpoint evaluates to -inf
        let v = eval_g(&two_atom(2.0), 5.0).unwrap();
        assert!(!v.finite && v.value == f64::NEG_INFINITY);
        let v = eval_g(&two_atom(1.0), -4.0).unwrap();
        assert_eq!(v.value, f64::NEG_INFINITY);
        // p < 1: finite limit -1/(1-p) for the degenerate atom
        let m = two_atom(0.5);
        let expected = 5.0 * 0.05 - 0.5 * 25.0 * 0.01 / 2.0
            + (-1.0 / 0.5 - 5.0 * -0.2)
            + ((2.25f64.sqrt() - 1.0) / 0.5 - 5.0 * 0.25);
        let v = eval_g(&m, 5.0).unwrap();
        assert!(v.finite);
        assert_relative_eq!(v.value, expected, max_relative = 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            eval_g(&two_atom(2.0), 5.1),
            Err(Error::Domain { .. })
        ));
        assert!(eval_g_prime(&two_atom(2.0), 5.0).is_err());
        assert!(eval_g_prime(&two_atom(0.5), -4.0).is_err());
        assert!(eval_g_prime(&two_atom(0.5), 4.99).is_ok());
    }

    #[test]
    fn continuous_value_merton() {
        let v = continuous_value(&merton(0.04, 2.0), 0.5).unwrap();
        assert_relative_eq!(v, -(-0.01f64).exp(), max_relative = 1e-14);
        let v = continuous_value(&merton(0.04, 1.0), 1.0).unwrap();
        assert_relative_eq!(v, 0.02, max_relative = 1e-14);
    }
}
