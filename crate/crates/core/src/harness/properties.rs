//! Sign and risk-aversion ordering of the optimal strategies.

use serde::Serialize;

use super::output::{num, CsvTable};
use crate::discrete::{GnMethod, PeriodLaw};
use crate::error::{Error, Result};
use crate::model::MarketModel;
use crate::optimizer::{optimal_continuous, Constraint};

/// Slack for comparing two solver outputs.
pub const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyRow {
    pub p: f64,
    /// Unconstrained continuous-time optimum.
    pub pi_p: f64,
    /// N-period optimum on `[0, 1]`.
    pub pi_pn: f64,
    pub sign_ok: bool,
    /// Ordering against the previous row; `true` on the first row.
    pub monotone_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub drift: f64,
    pub periods: usize,
    pub rows: Vec<PropertyRow>,
}

pub const PROPERTY_COLUMNS: [&str; 5] = ["p", "pi_p", "pi_pN", "sign_ok", "monotone_ok"];

impl PropertyReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.sign_ok && r.monotone_ok)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(PROPERTY_COLUMNS.to_vec());
        for r in &self.rows {
            t.push(vec![
                num(r.p),
                num(r.pi_p),
                num(r.pi_pn),
                r.sign_ok.to_string(),
                r.monotone_ok.to_string(),
            ]);
        }
        t
    }
}

fn sign_ok(b: f64, pi: f64, pi_n: f64) -> bool {
    let mut ok = true;
    if b >= 0.0 {
        ok &= pi >= -ORDER_TOL && pi_n >= 0.0;
    }
    if b <= 0.0 {
        ok &= pi <= ORDER_TOL && pi_n == 0.0;
    }
    if pi >= 1.0 {
        ok &= pi_n == 1.0;
    }
    ok
}

/// Decreasing in `p` when `b > 0`, increasing when `b < 0`.
fn ordered(b: f64, prev: f64, next: f64) -> bool {
    if b > 0.0 {
        next <= prev + ORDER_TOL
    } else if b < 0.0 {
        next >= prev - ORDER_TOL
    } else {
        (next - prev).abs() <= ORDER_TOL
    }
}

pub fn run_property_checks(
    model: &MarketModel,
    p_list: &[f64],
    periods: usize,
    method: &GnMethod,
) -> Result<PropertyReport> {
    if p_list.is_empty() {
        return Err(Error::InvalidArgument("p-list is empty".into()));
    }
    if let Some(&p) = p_list.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidArgument(format!("p = {p} must be positive")));
    }
    if !p_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!(
            "p-list {p_list:?} must be strictly increasing"
        )));
    }
    if periods == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let b = model.triplet.drift;
    let mut rows: Vec<PropertyRow> = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let m = model.with_p(p);
        m.ensure_valid()?;
        let pi = optimal_continuous(&m, Constraint::Unconstrained)?.argmax;
        let pi_n = PeriodLaw::new(&m, periods, method)?
            .maximize(&m, periods)?
            .argmax;
        let monotone_ok = rows
            .last()
            .is_none_or(|r| ordered(b, r.pi_p, pi) && ordered(b, r.pi_pn, pi_n));
        rows.push(PropertyRow {
            p,
            pi_p: pi,
            pi_pn: pi_n,
            sign_ok: sign_ok(b, pi, pi_n),
            monotone_ok,
        });
    }
    Ok(PropertyReport {
        drift: b,
        periods,
        rows,
    })
}
