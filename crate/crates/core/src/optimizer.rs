//! One-dimensional concave maximization by bisection on the derivative.

use std::cell::Cell;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{admissible_set, AdmissibleInterval, MarketModel};
use crate::objective::{g_prime_raw, g_raw};

/// Tolerance on `|f'|` at an interior maximizer.
pub const DERIVATIVE_TOL: f64 = 1e-10;
/// Bisection stops once the bracket is this narrow.
pub const BRACKET_TOL: f64 = 1e-12;
/// Cap on bracket expansion steps toward an infinite or open end.
pub const MAX_EXPANSIONS: usize = 60;

const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Interior,
    Lower,
    Upper,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::Interior => "interior",
            Boundary::Lower => "lower",
            Boundary::Upper => "upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptResult {
    pub argmax: f64,
    pub value: f64,
    pub boundary: Boundary,
    /// Derivative at the argmax; one-sided at a boundary.
    pub derivative: f64,
    pub iterations: usize,
}

impl OptResult {
    /// `|f'(π)|` for interior results, zero at a boundary.
    pub fn residual(&self) -> f64 {
        match self.boundary {
            Boundary::Interior => self.derivative.abs(),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    /// Maximize over the whole admissible set.
    Unconstrained,
    /// Maximize over `[0, 1]`.
    UnitInterval,
}

/// Maximizes a concave differentiable `f` over `interval`.
///
/// A closed endpoint is returned when its one-sided derivative points
/// outward or is within `tol` of zero. `f_prime` may return `±∞` at closed
/// endpoints; open endpoints are never evaluated. Unbounded or open ends are bracketed by moving geometrically
/// toward them until the derivative changes sign.
pub fn maximize_concave_1d<F, D>(
    f: F,
    f_prime: D,
    interval: &AdmissibleInterval,
    tol: f64,
) -> Result<OptResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let evals = Cell::new(0usize);
    let deriv = |x: f64| {
        evals.set(evals.get() + 1);
        f_prime(x)
    };
    let finish = |x: f64, d: f64, boundary: Boundary| OptResult {
        argmax: x,
        value: f(x),
        boundary,
        derivative: d,
        iterations: evals.get(),
    };

    if interval.lower_closed {
        let d = deriv(interval.lower);
        if d <= tol {
            return Ok(finish(interval.lower, d, Boundary::Lower));
        }
    }
    if interval.upper_closed {
        let d = deriv(interval.upper);
        if d >= -tol {
            return Ok(finish(interval.upper, d, Boundary::Upper));
        }
    }

    let anchor = match (interval.lower.is_finite(), interval.upper.is_finite()) {
        (true, true) => 0.5 * (interval.lower + interval.upper),
        (true, false) => interval.lower + 1.0,
        (false, true) => interval.upper - 1.0,
        (false, false) => 0.0,
    };
    let d_anchor = deriv(anchor);
    if d_anchor == 0.0 {
        return Ok(finish(anchor, 0.0, Boundary::Interior));
    }

    // Find `lo` with f' > 0 and `hi` with f' < 0.
    let (mut lo, mut hi) = if d_anchor > 0.0 {
        let hi = if interval.upper_closed {
            interval.upper
        } else {
            expand(anchor, interval.upper, |x| deriv(x) < 0.0).ok_or_else(|| {
                Error::Unbounded(format!(
                    "derivative stays positive toward the upper end of {interval}"
                ))
            })?
        };
        (anchor, hi)
    } else {
        let lo = if interval.lower_closed {
            interval.lower
        } else {
            expand(anchor, interval.lower, |x| deriv(x) > 0.0).ok_or_else(|| {
                Error::Unbounded(format!(
                    "derivative stays negative toward the lower end of {interval}"
                ))
            })?
        };
        (lo, anchor)
    };

    let mut mid = 0.5 * (lo + hi);
    let mut d_mid = f64::NAN;
    for _ in 0..MAX_BISECTIONS {
        mid = 0.5 * (lo + hi);
        d_mid = deriv(mid);
        if d_mid.abs() <= tol || hi - lo <= BRACKET_TOL {
            break;
        }
        if d_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(finish(mid, d_mid, Boundary::Interior))
}

/// Walks from `start` toward `end` until `found` holds. Infinite ends are
/// approached by doubling steps, finite open ends by halving the remaining
/// distance, so `end` itself is never probed.
fn expand(start: f64, end: f64, mut found: impl FnMut(f64) -> bool) -> Option<f64> {
    if end.is_infinite() {
        let dir = end.signum();
        let mut step = 1.0;
        for _ in 0..MAX_EXPANSIONS {
            let x = start + dir * step;
            if found(x) {
                return Some(x);
            }
            step *= 2.0;
        }
    } else {
        let mut x = start;
        for _ in 0..MAX_EXPANSIONS {
            x = end - 0.5 * (end - x);
            if x == end {
                break;
            }
            if found(x) {
                return Some(x);
            }
        }
    }
    None
}

/// Optimal constant strategy of the continuous-time problem.
pub fn optimal_continuous(model: &MarketModel, constraint: Constraint) -> Result<OptResult> {
    model.ensure_valid()?;
    let interval = match constraint {
        Constraint::Unconstrained => admissible_set(&model.triplet, &model.utility),
        Constraint::UnitInterval => AdmissibleInterval::unit(),
    };
    maximize_concave_1d(
        |pi| g_raw(model, pi),
        |pi| g_prime_raw(model, pi),
        &interval,
        DERIVATIVE_TOL,
    )
}
