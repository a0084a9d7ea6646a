#![allow(dead_code)]

use std::path::PathBuf;

use levy_opt::{JumpAtom, LevyTriplet, MarketModel};
use proptest::prelude::*;

pub fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

pub fn load(name: &str) -> MarketModel {
    MarketModel::from_json_file(config(name)).unwrap()
}

pub fn merton(b: f64, p: f64) -> MarketModel {
    MarketModel::new(LevyTriplet::new(b, 0.04, vec![]), 1.0, 1.0, p)
}

pub fn two_atom(p: f64) -> MarketModel {
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

fn atom() -> impl Strategy<Value = JumpAtom> {
    (prop_oneof![-0.9..-0.01f64, 0.01..1.5f64], 0.1..3.0f64).prop_map(|(x, l)| JumpAtom::new(x, l))
}

/// Valid models: diffusion, or jumps on both sides.
pub fn valid_model() -> impl Strategy<Value = MarketModel> {
    (
        -0.2..0.2f64,
        prop_oneof![Just(0.0), 0.001..0.1f64],
        proptest::collection::vec(atom(), 0..4),
        0.25..3.0f64,
        0.1..10.0f64,
        0.3..5.0f64,
    )
        .prop_map(|(b, c, atoms, t, x0, p)| {
            MarketModel::new(LevyTriplet::new(b, c, atoms), t, x0, p)
        })
        .prop_filter("assumptions hold", |m| m.ensure_valid().is_ok())
}

pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Valid models whose one-period quadrature needs at most 40 jumps, so the
/// discrete proptests stay fast.
#[allow(dead_code)]
pub fn tractable_model() -> impl Strategy<Value = MarketModel> {
    valid_model().prop_filter("quadrature cutoff is small", |m| {
        let log = levy_opt::log_triplet(&m.triplet);
        let mean: f64 = log.atoms.iter().map(|a| a.intensity).sum::<f64>() * m.horizon;
        let growth = levy_opt::discrete::quadrature::jump_growth(&log, m.p());
        levy_opt::discrete::quadrature::weighted_cutoff(mean, growth) <= 40
    })
}
