//! Convergence of the N-period problem to the constrained continuous one.

use serde::Serialize;

use super::output::{num, CsvTable};
use super::uniform::{sup_norm_gap, unit_grid};
use crate::discrete::{value_from_gn, GnMethod, McConfig, PeriodLaw};
use crate::error::{Error, Result};
use crate::model::MarketModel;
use crate::objective::{continuous_value, g_raw};
use crate::optimizer::{optimal_continuous, Boundary, Constraint};
use crate::wealth_sim::l2_terminal_gap;

/// Smallest allowed number of grid cells for the sup-norm.
pub const MIN_GRID: usize = 10;
/// Default number of grid cells (21 grid points).
pub const DEFAULT_GRID: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSettings {
    pub periods: Vec<usize>,
    /// Number of grid cells `G`; the grid is `{0, 1/G, ..., 1}`.
    pub grid: usize,
    pub method: GnMethod,
    /// Coupled paths for the L² column; `None` leaves the column empty.
    pub wealth: Option<McConfig>,
}

impl ConvergenceSettings {
    pub fn new(periods: Vec<usize>) -> Self {
        Self {
            periods,
            grid: DEFAULT_GRID,
            method: GnMethod::default(),
            wealth: None,
        }
    }

    fn check(&self) -> Result<()> {
        if self.periods.is_empty() {
            return Err(Error::InvalidArgument("N-list is empty".into()));
        }
        if self.periods.contains(&0) {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if !self.periods.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "N-list {:?} must be strictly ascending",
                self.periods
            )));
        }
        if self.grid < MIN_GRID {
            return Err(Error::InvalidArgument(format!(
                "grid must have at least {MIN_GRID} cells, got {}",
                self.grid
            )));
        }
        if let Some(mc) = &self.wealth {
            mc.check()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReference {
    /// `π*_C`, maximizer of `g` on `[0, 1]`.
    pub pi_c: f64,
    pub g_at_pi_c: f64,
    pub value: f64,
    /// Unconstrained `π*`, for reference.
    pub pi_unconstrained: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub pi_n: f64,
    pub boundary: Boundary,
    pub gn_at_pi_n: f64,
    pub derivative_residual: f64,
    /// `max` over the grid of `|g^N - g|`.
    pub sup_gap: f64,
    pub value_n: f64,
    pub value_gap: f64,
    /// `E[(x0 E(π*_N Z^N)_T - x0 E(π*_C L)_T)²]`; NaN when not simulated.
    pub l2_gap: f64,
    pub l2_gap_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub reference: ConvergenceReference,
    pub rows: Vec<ConvergenceRow>,
    pub grid: usize,
}

pub const CONVERGENCE_COLUMNS: [&str; 10] = [
    "N",
    "pi_N",
    "boundary",
    "gN_at_pi_N",
    "derivative_residual",
    "sup_gap",
    "value_N",
    "value_gap",
    "l2_gap",
    "l2_gap_se",
];

impl ConvergenceReport {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(CONVERGENCE_COLUMNS.to_vec());
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                num(r.pi_n),
                r.boundary.as_str().to_string(),
                num(r.gn_at_pi_n),
                num(r.derivative_residual),
                num(r.sup_gap),
                num(r.value_n),
                num(r.value_gap),
                num(r.l2_gap),
                num(r.l2_gap_se),
            ]);
        }
        t
    }
}

pub fn run_convergence_study(
    model: &MarketModel,
    settings: &ConvergenceSettings,
) -> Result<ConvergenceReport> {
    model.ensure_valid()?;
    settings.check()?;

    let constrained = optimal_continuous(model, Constraint::UnitInterval)?;
    let unconstrained = optimal_continuous(model, Constraint::Unconstrained)?;
    let reference = ConvergenceReference {
        pi_c: constrained.argmax,
        g_at_pi_c: constrained.value,
        value: continuous_value(model, constrained.argmax)?,
        pi_unconstrained: unconstrained.argmax,
    };

    let grid = unit_grid(settings.grid);
    let g_grid: Vec<f64> = grid.iter().map(|&pi| g_raw(model, pi)).collect();

    let mut rows = Vec::with_capacity(settings.periods.len());
    for &n in &settings.periods {
        let law = PeriodLaw::new(model, n, &settings.method)?;
        let opt = law.maximize(model, n)?;
        let gn_grid: Vec<f64> = grid.iter().map(|&pi| law.gn(model, n, pi).value).collect();
        let value_n = value_from_gn(model, n, opt.value);
        let (l2_gap, l2_gap_se) = match &settings.wealth {
            Some(mc) => {
                let gaps = l2_terminal_gap(model, opt.argmax, reference.pi_c, n, mc)?;
                (gaps.product_vs_exact.mean, gaps.product_vs_exact.std_error)
            }
            None => (f64::NAN, f64::NAN),
        };
        rows.push(ConvergenceRow {
            n,
            pi_n: opt.argmax,
            boundary: opt.boundary,
            gn_at_pi_n: opt.value,
            derivative_residual: opt.residual(),
            sup_gap: sup_norm_gap(&g_grid, &gn_grid),
            value_n,
            value_gap: (value_n - reference.value).abs(),
            l2_gap,
            l2_gap_se,
        });
    }
    Ok(ConvergenceReport {
        reference,
        rows,
        grid: settings.grid,
    })
}
