//! N-period model: trading only at `kT/N`, per-period gross return
//! `1 + Z` with `Z = e^{L̃_{T/N}} - 1` i.i.d.
//!
//! `g^N(π) = (N/T) E[((1 + πZ)^(1-p) - 1)/(1-p)]` (log form at `p = 1`) is
//! evaluated either by Monte Carlo over a fixed sample set or by quadrature.
//! The Monte Carlo sample set depends only on `(model, N, seed)`, so the
//! estimate is a concave function of `π` and can be handed to the solver.

pub mod quadrature;
pub mod sampling;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{log_triplet, AdmissibleInterval, MarketModel};
use crate::objective::{log_gross_return, power_gain_log};
use crate::optimizer::{maximize_concave_1d, OptResult, DERIVATIVE_TOL};
use crate::parallel::{block_reduce, par_fill, RunningStats};

pub use quadrature::QuadRule;
pub use sampling::{path_rng, sample_log_increment, IncrementSampler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl McConfig {
    /// Path count used when optimizing.
    pub const DEFAULT_PATHS: usize = 100_000;
    /// Path count used by the acceptance runs.
    pub const ACCEPTANCE_PATHS: usize = 1_000_000;

    pub fn new(paths: usize, seed: u64) -> Self {
        Self {
            paths,
            seed,
            antithetic: false,
        }
    }

    pub fn antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::InvalidArgument(format!(
                "path count {} must be at least 2",
                self.paths
            )));
        }
        if self.antithetic && !self.paths.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "antithetic sampling needs an even path count, got {}",
                self.paths
            )));
        }
        Ok(())
    }

    /// `(stream, sign)` for path `i`: antithetic pairs share a stream and
    /// flip the Gaussian draw.
    pub(crate) fn stream_of(&self, i: usize) -> (u64, f64) {
        if self.antithetic {
            ((i / 2) as u64, if i % 2 == 1 { -1.0 } else { 1.0 })
        } else {
            (i as u64, 1.0)
        }
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self::new(Self::DEFAULT_PATHS, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadConfig {
    /// Jump-count cutoff; chosen from the Poisson tail bound when `None`.
    pub max_jumps: Option<usize>,
    /// Gauss-Hermite node count.
    pub nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            max_jumps: None,
            nodes: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GnMethod {
    Mc(McConfig),
    Quad(QuadConfig),
}

impl Default for GnMethod {
    fn default() -> Self {
        GnMethod::Quad(QuadConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    Mc,
    Quadrature,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::Mc => "mc",
            MethodTag::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnValue {
    pub value: f64,
    /// Zero for quadrature.
    pub std_error: f64,
    pub method: MethodTag,
}

/// Law of the one-period log-return `x = L̃_{T/N}` (so `Z = e^x - 1`), as a
/// sample set or a quadrature rule.
#[derive(Debug, Clone)]
pub enum PeriodLaw {
    Samples { x: Vec<f64>, antithetic: bool },
    Rule(QuadRule),
}

impl PeriodLaw {
    pub fn new(model: &MarketModel, periods: usize, method: &GnMethod) -> Result<Self> {
        model.ensure_valid()?;
        if periods == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        let log = log_triplet(&model.triplet);
        let dt = model.horizon / periods as f64;
        match method {
            GnMethod::Mc(mc) => Self::sampled(&log, dt, mc),
            GnMethod::Quad(q) => {
                match QuadRule::build(&log, dt, model.p(), q.max_jumps, q.nodes)? {
                    Some(rule) => Ok(PeriodLaw::Rule(rule)),
                    None => {
                        log::warn!(
                            "jump enumeration for N = {periods} exceeds {} configurations, \
                         falling back to Monte Carlo with {} paths",
                            quadrature::MAX_JUMP_CONFIGS,
                            McConfig::DEFAULT_PATHS
                        );
                        Self::sampled(&log, dt, &McConfig::default())
                    }
                }
            }
        }
    }

    fn sampled(log: &crate::model::LogTriplet, dt: f64, mc: &McConfig) -> Result<Self> {
        mc.check()?;
        let sampler = IncrementSampler::new(log, dt);
        let x = par_fill(mc.paths, |i| {
            let (stream, sign) = mc.stream_of(i);
            let mut rng = path_rng(mc.seed, stream);
            sampler.sample_signed(&mut rng, sign)
        });
        Ok(PeriodLaw::Samples {
            x,
            antithetic: mc.antithetic,
        })
    }

    pub fn method(&self) -> MethodTag {
        match self {
            PeriodLaw::Samples { .. } => MethodTag::Mc,
            PeriodLaw::Rule(_) => MethodTag::Quadrature,
        }
    }

    /// `(E[f(x)], standard error)` over the log-return `x`.
    pub fn expect<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        match self {
            PeriodLaw::Rule(rule) => (rule.expect(f), 0.0),
            PeriodLaw::Samples { x, antithetic } => {
                let stride = if *antithetic { 2 } else { 1 };
                let units = x.len() / stride;
                let stats = block_reduce(
                    units,
                    |range| {
                        let mut s = RunningStats::default();
                        for j in range {
                            let v = if stride == 2 {
                                0.5 * (f(x[2 * j]) + f(x[2 * j + 1]))
                            } else {
                                f(x[j])
                            };
                            s.push(v);
                        }
                        s
                    },
                    RunningStats::merge,
                )
                .unwrap_or_default();
                (stats.mean, stats.std_error())
            }
        }
    }

    fn scaled(
        &self,
        model: &MarketModel,
        periods: usize,
        f: impl Fn(f64) -> f64 + Sync + Send,
    ) -> GnValue {
        let scale = periods as f64 / model.horizon;
        let (mean, se) = self.expect(f);
        GnValue {
            value: scale * mean,
            std_error: scale * se,
            method: self.method(),
        }
    }

    pub fn gn(&self, model: &MarketModel, periods: usize, pi: f64) -> GnValue {
        let p = model.p();
        self.scaled(model, periods, move |x| {
            power_gain_log(log_gross_return(x, pi), p)
        })
    }

    pub fn gn_prime(&self, model: &MarketModel, periods: usize, pi: f64) -> GnValue {
        let p = model.p();
        self.scaled(model, periods, move |x| {
            x.exp_m1() * (-p * log_gross_return(x, pi)).exp()
        })
    }

    /// Maximizes this law's `g^N` over `[0, 1]`.
    pub fn maximize(&self, model: &MarketModel, periods: usize) -> Result<OptResult> {
        maximize_concave_1d(
            |pi| self.gn(model, periods, pi).value,
            |pi| self.gn_prime(model, periods, pi).value,
            &AdmissibleInterval::unit(),
            DERIVATIVE_TOL,
        )
    }
}

fn check_unit(pi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&pi) {
        Ok(())
    } else {
        Err(Error::domain(pi, "[0, 1]"))
    }
}

pub fn eval_gn(model: &MarketModel, periods: usize, pi: f64, method: &GnMethod) -> Result<GnValue> {
    check_unit(pi)?;
    Ok(PeriodLaw::new(model, periods, method)?.gn(model, periods, pi))
}

/// `(g^N)'(π) = (N/T) E[Z (1 + πZ)^(-p)]`. Defined on the closed unit
/// interval since `1 + πZ > 0` there.
pub fn eval_gn_prime(
    model: &MarketModel,
    periods: usize,
    pi: f64,
    method: &GnMethod,
) -> Result<GnValue> {
    check_unit(pi)?;
    Ok(PeriodLaw::new(model, periods, method)?.gn_prime(model, periods, pi))
}

/// Optimal constant strategy `π*_N ∈ [0, 1]` of the N-period model.
pub fn optimal_discrete(
    model: &MarketModel,
    periods: usize,
    method: &GnMethod,
) -> Result<OptResult> {
    PeriodLaw::new(model, periods, method)?.maximize(model, periods)
}

/// `E[U(x0 Π(1 + πZ_j))] = x0^(1-p) (1 + (1-p) T g^N / N)^N / (1-p)`, or
/// `log x0 + T g^N` at `p = 1`.
pub fn value_from_gn(model: &MarketModel, periods: usize, gn: f64) -> f64 {
    let p = model.p();
    let x0 = model.initial_wealth;
    let t = model.horizon;
    if p == 1.0 {
        return x0.ln() + t * gn;
    }
    let step = (1.0 - p) * t * gn / periods as f64;
    if step <= -1.0 {
        log::warn!(
            "1 + (1-p) T g^N / N = {} <= 0 for g^N = {gn}, N = {periods}; value set to -inf",
            1.0 + step
        );
        return f64::NEG_INFINITY;
    }
    x0.powf(1.0 - p) * (periods as f64 * step.ln_1p()).exp() / (1.0 - p)
}

pub fn discrete_value_function(
    model: &MarketModel,
    periods: usize,
    pi: f64,
    method: &GnMethod,
) -> Result<f64> {
    let gn = eval_gn(model, periods, pi, method)?;
    Ok(value_from_gn(model, periods, gn.value))
}
