//! Coupled simulation of three terminal wealths driven by one realization
//! of the jumps and the Brownian path on the N-grid:
//!
//! * exact `x0 E(π_c L)_T`,
//! * Euler `x0 Π (1 + π_d ΔL_j)`,
//! * N-period product `x0 Π (1 + π_d (e^{ΔL̃_j} - 1))`.
//!
//! Jumps are drawn in continuous time and binned to grid cells, and `W_T`
//! is the sum of the grid increments, so all three share randomness exactly.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::Serialize;

use crate::discrete::{path_rng, McConfig};
use crate::error::{Error, Result};
use crate::model::{admissible_set, log_triplet, MarketModel};
use crate::parallel::{block_reduce, RunningStats};

/// Grid increments of `L̃` and `L` plus the randomness that produced them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoupledPath {
    pub log_increments: Vec<f64>,
    pub increments: Vec<f64>,
    /// Brownian increments `ΔW_j` (variance `T/N` each).
    pub brownian: Vec<f64>,
    pub jump_times: Vec<f64>,
    pub jump_atoms: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TerminalTriple {
    pub exact: f64,
    pub euler: f64,
    pub product: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl From<RunningStats> for Estimate {
    fn from(s: RunningStats) -> Self {
        Self {
            mean: s.mean,
            std_error: s.std_error(),
        }
    }
}

/// Monte Carlo estimates of `E[(A - B)²]` for each pair of terminals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct L2Gaps {
    pub product_vs_euler: Estimate,
    pub euler_vs_exact: Estimate,
    pub product_vs_exact: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledSummary {
    pub paths: usize,
    pub exact: Estimate,
    pub exact_squared: Estimate,
    pub euler: Estimate,
    pub product: Estimate,
    pub gaps: L2Gaps,
    /// Paths with Euler wealth `<= 0`; they are kept in every estimate.
    pub euler_nonpositive: u64,
    pub product_nonpositive: u64,
    /// Largest relative mismatch between `exp(Σ ΔL̃_j)` and `S_T/S_0`
    /// rebuilt from the jump record and `W_T`.
    pub max_coupling_error: f64,
}

/// Generates coupled paths for one model and grid.
#[derive(Debug, Clone)]
pub struct CoupledSimulator {
    periods: usize,
    dt: f64,
    horizon: f64,
    x0: f64,
    vol: f64,
    diffusion: f64,
    drift_step: f64,
    log_drift_step: f64,
    compensated_drift: f64,
    jump_count: Option<Poisson<f64>>,
    cumulative: Vec<f64>,
    sizes: Vec<f64>,
    log_sizes: Vec<f64>,
}

impl CoupledSimulator {
    pub fn new(model: &MarketModel, periods: usize) -> Result<Self> {
        model.ensure_valid()?;
        if periods == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        let t = &model.triplet;
        let log = log_triplet(t);
        let lambda = t.total_intensity();
        let dt = model.horizon / periods as f64;
        let compensated_drift = t.drift - t.jump_mean_rate();
        let mut acc = 0.0;
        Ok(Self {
            periods,
            dt,
            horizon: model.horizon,
            x0: model.initial_wealth,
            vol: t.diffusion.sqrt(),
            diffusion: t.diffusion,
            drift_step: compensated_drift * dt,
            log_drift_step: log.path_drift() * dt,
            compensated_drift,
            jump_count: (lambda > 0.0)
                .then(|| Poisson::new(lambda * model.horizon).expect("positive rate")),
            cumulative: t
                .atoms
                .iter()
                .map(|a| {
                    acc += a.intensity / lambda;
                    acc
                })
                .collect(),
            sizes: t.atoms.iter().map(|a| a.size).collect(),
            log_sizes: log.atoms.iter().map(|a| a.size).collect(),
        })
    }

    /// Fills `path` with one coupled realization. `sign` flips the Brownian
    /// increments (antithetic partner).
    pub fn fill_path<R: Rng + ?Sized>(&self, rng: &mut R, sign: f64, path: &mut CoupledPath) {
        let n = self.periods;
        let sqrt_dt = self.dt.sqrt();
        path.brownian.clear();
        path.log_increments.clear();
        path.increments.clear();
        path.jump_times.clear();
        path.jump_atoms.clear();
        for _ in 0..n {
            let dw = if self.diffusion > 0.0 {
                let g: f64 = StandardNormal.sample(rng);
                sign * sqrt_dt * g
            } else {
                0.0
            };
            path.brownian.push(dw);
            path.log_increments
                .push(self.log_drift_step + self.vol * dw);
            path.increments.push(self.drift_step + self.vol * dw);
        }
        if let Some(poisson) = &self.jump_count {
            let k = poisson.sample(rng) as usize;
            for _ in 0..k {
                let time = rng.random::<f64>() * self.horizon;
                let u = rng.random::<f64>();
                let atom = self
                    .cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(self.sizes.len() - 1);
                let bin = ((time / self.dt) as usize).min(n - 1);
                path.jump_times.push(time);
                path.jump_atoms.push(atom);
                path.increments[bin] += self.sizes[atom];
                path.log_increments[bin] += self.log_sizes[atom];
            }
        }
    }

    pub fn terminals(&self, path: &CoupledPath, pi_d: f64, pi_c: f64) -> TerminalTriple {
        let w_t: f64 = path.brownian.iter().sum();
        let mut exact = (pi_c * self.compensated_drift * self.horizon + pi_c * self.vol * w_t
            - 0.5 * pi_c * pi_c * self.diffusion * self.horizon)
            .exp();
        for &a in &path.jump_atoms {
            exact *= 1.0 + pi_c * self.sizes[a];
        }
        let euler: f64 = path.increments.iter().map(|&dl| 1.0 + pi_d * dl).product();
        let product: f64 = path
            .log_increments
            .iter()
            .map(|&dy| 1.0 + pi_d * dy.exp_m1())
            .product();
        TerminalTriple {
            exact: self.x0 * exact,
            euler: self.x0 * euler,
            product: self.x0 * product,
        }
    }

    /// Relative mismatch between `exp(Σ ΔL̃_j)` and the stock ratio rebuilt
    /// from the jump record and `W_T`.
    pub fn coupling_error(&self, path: &CoupledPath) -> f64 {
        let from_grid = path.log_increments.iter().sum::<f64>().exp();
        let w_t: f64 = path.brownian.iter().sum();
        let mut direct = (self.compensated_drift * self.horizon + self.vol * w_t
            - 0.5 * self.diffusion * self.horizon)
            .exp();
        for &a in &path.jump_atoms {
            direct *= 1.0 + self.sizes[a];
        }
        ((from_grid - direct) / direct).abs()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    exact: RunningStats,
    exact_sq: RunningStats,
    euler: RunningStats,
    product: RunningStats,
    pe: RunningStats,
    ee: RunningStats,
    px: RunningStats,
    euler_nonpositive: u64,
    product_nonpositive: u64,
    max_coupling_error: f64,
}

impl Acc {
    fn merge(self, o: Self) -> Self {
        Self {
            exact: self.exact.merge(o.exact),
            exact_sq: self.exact_sq.merge(o.exact_sq),
            euler: self.euler.merge(o.euler),
            product: self.product.merge(o.product),
            pe: self.pe.merge(o.pe),
            ee: self.ee.merge(o.ee),
            px: self.px.merge(o.px),
            euler_nonpositive: self.euler_nonpositive + o.euler_nonpositive,
            product_nonpositive: self.product_nonpositive + o.product_nonpositive,
            max_coupling_error: self.max_coupling_error.max(o.max_coupling_error),
        }
    }
}

/// Runs `mc.paths` coupled paths and summarizes the terminal triples.
///
/// `pi_d ∈ [0, 1]` drives the Euler and product wealths, `pi_c` (admissible)
/// the exact wealth.
pub fn simulate_coupled_terminals(
    model: &MarketModel,
    pi_d: f64,
    pi_c: f64,
    periods: usize,
    mc: &McConfig,
) -> Result<CoupledSummary> {
    if !(0.0..=1.0).contains(&pi_d) {
        return Err(Error::domain(pi_d, "[0, 1]"));
    }
    let sim = CoupledSimulator::new(model, periods)?;
    let admissible = admissible_set(&model.triplet, &model.utility);
    if !admissible.contains(pi_c) {
        return Err(Error::domain(pi_c, admissible.to_string()));
    }
    mc.check()?;

    let stride = if mc.antithetic { 2 } else { 1 };
    let units = mc.paths / stride;
    let acc = block_reduce(
        units,
        |range| {
            let mut acc = Acc::default();
            let mut path = CoupledPath::default();
            for unit in range {
                let mut sums = [0.0f64; 7];
                for k in 0..stride {
                    let (stream, sign) = mc.stream_of(unit * stride + k);
                    let mut rng = path_rng(mc.seed, stream);
                    sim.fill_path(&mut rng, sign, &mut path);
                    let t = sim.terminals(&path, pi_d, pi_c);
                    if t.euler <= 0.0 {
                        acc.euler_nonpositive += 1;
                    }
                    if t.product <= 0.0 {
                        acc.product_nonpositive += 1;
                    }
                    acc.max_coupling_error = acc.max_coupling_error.max(sim.coupling_error(&path));
                    let vals = [
                        t.exact,
                        t.exact * t.exact,
                        t.euler,
                        t.product,
                        (t.product - t.euler).powi(2),
                        (t.euler - t.exact).powi(2),
                        (t.product - t.exact).powi(2),
                    ];
                    for (s, v) in sums.iter_mut().zip(vals) {
                        *s += v;
                    }
                }
                let w = 1.0 / stride as f64;
                acc.exact.push(w * sums[0]);
                acc.exact_sq.push(w * sums[1]);
                acc.euler.push(w * sums[2]);
                acc.product.push(w * sums[3]);
                acc.pe.push(w * sums[4]);
                acc.ee.push(w * sums[5]);
                acc.px.push(w * sums[6]);
            }
            acc
        },
        Acc::merge,
    )
    .unwrap_or_default();

    Ok(CoupledSummary {
        paths: mc.paths,
        exact: acc.exact.into(),
        exact_squared: acc.exact_sq.into(),
        euler: acc.euler.into(),
        product: acc.product.into(),
        gaps: L2Gaps {
            product_vs_euler: acc.pe.into(),
            euler_vs_exact: acc.ee.into(),
            product_vs_exact: acc.px.into(),
        },
        euler_nonpositive: acc.euler_nonpositive,
        product_nonpositive: acc.product_nonpositive,
        max_coupling_error: acc.max_coupling_error,
    })
}

pub fn l2_terminal_gap(
    model: &MarketModel,
    pi_d: f64,
    pi_c: f64,
    periods: usize,
    mc: &McConfig,
) -> Result<L2Gaps> {
    Ok(simulate_coupled_terminals(model, pi_d, pi_c, periods, mc)?.gaps)
}
