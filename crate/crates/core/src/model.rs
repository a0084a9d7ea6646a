//! Market model: Lévy triplet of the return process `L`, the triplet of the
//! log-price process `log E(L)`, power utility and the admissible strategy set.
//!
//! Truncation is fixed to `h(x) = x` throughout, so the drift `b` is the
//! mean rate of `L`. Jump measures are finite sums of atoms.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One atom of the jump measure: jumps of relative size `size` arriving at
/// rate `intensity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpAtom {
    pub size: f64,
    pub intensity: f64,
}

impl JumpAtom {
    pub fn new(size: f64, intensity: f64) -> Self {
        Self { size, intensity }
    }
}

/// Triplet `(b, c, F)` of the process driving the stock, `h(x) = x`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevyTriplet {
    pub drift: f64,
    pub diffusion: f64,
    pub atoms: Vec<JumpAtom>,
}

impl LevyTriplet {
    pub fn new(drift: f64, diffusion: f64, atoms: Vec<JumpAtom>) -> Self {
        Self {
            drift,
            diffusion,
            atoms,
        }
    }

    pub fn total_intensity(&self) -> f64 {
        self.atoms.iter().map(|a| a.intensity).sum()
    }

    /// `∫ x F(dx)`, the jump compensator rate.
    pub fn jump_mean_rate(&self) -> f64 {
        self.atoms.iter().map(|a| a.intensity * a.size).sum()
    }

    /// Triplet of `πL`.
    pub fn scaled(&self, pi: f64) -> Self {
        Self {
            drift: pi * self.drift,
            diffusion: pi * pi * self.diffusion,
            atoms: self
                .atoms
                .iter()
                .map(|a| JumpAtom::new(pi * a.size, a.intensity))
                .collect(),
        }
    }

    fn has_negative_jumps(&self) -> bool {
        self.atoms.iter().any(|a| a.size < 0.0)
    }

    fn has_positive_jumps(&self) -> bool {
        self.atoms.iter().any(|a| a.size > 0.0)
    }
}

/// Triplet of `log E(L)`. Atom sizes are log-returns `log(1 + x)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogTriplet {
    pub drift: f64,
    pub diffusion: f64,
    pub atoms: Vec<JumpAtom>,
}

impl LogTriplet {
    pub fn total_intensity(&self) -> f64 {
        self.atoms.iter().map(|a| a.intensity).sum()
    }

    /// Drift of the uncompensated representation
    /// `L̃_t = (b̃ - Σ λ_i y_i) t + √c̃ W_t + Σ_{k <= N_t} Y_k`, which is what a
    /// path sampler adds per unit time.
    pub fn path_drift(&self) -> f64 {
        self.drift - self.atoms.iter().map(|a| a.intensity * a.size).sum::<f64>()
    }

    /// Inverse of [`log_triplet`]: recovers the triplet of `L`.
    pub fn to_levy(&self) -> LevyTriplet {
        let mut drift = self.drift + self.diffusion / 2.0;
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let x = a.size.exp_m1();
                drift += a.intensity * (x - a.size);
                JumpAtom::new(x, a.intensity)
            })
            .collect();
        LevyTriplet {
            drift,
            diffusion: self.diffusion,
            atoms,
        }
    }
}

/// `U(x) = x^(1-p) / (1-p)`, logarithmic at `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerUtility {
    pub p: f64,
}

impl PowerUtility {
    pub fn new(p: f64) -> Self {
        Self { p }
    }

    pub fn is_log(&self) -> bool {
        self.p == 1.0
    }

    pub fn eval(&self, wealth: f64) -> f64 {
        if self.is_log() {
            wealth.ln()
        } else {
            wealth.powf(1.0 - self.p) / (1.0 - self.p)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel {
    pub triplet: LevyTriplet,
    pub horizon: f64,
    pub initial_wealth: f64,
    pub utility: PowerUtility,
}

impl MarketModel {
    pub fn new(triplet: LevyTriplet, horizon: f64, initial_wealth: f64, p: f64) -> Self {
        Self {
            triplet,
            horizon,
            initial_wealth,
            utility: PowerUtility::new(p),
        }
    }

    pub fn p(&self) -> f64 {
        self.utility.p
    }

    /// Same market with a different risk aversion.
    pub fn with_p(&self, p: f64) -> Self {
        Self {
            utility: PowerUtility::new(p),
            ..self.clone()
        }
    }

    /// Runs [`validate_model`] and converts the first failure into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_model(self);
        if report.passed() {
            Ok(())
        } else {
            Err(Error::InvalidModel(report.failure_summary()))
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(s)?;
        Ok(cfg.into())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub x: f64,
    pub lambda: f64,
}

/// JSON model document: `{"b", "c", "atoms": [{"x", "lambda"}], "T", "x0", "p"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub b: f64,
    pub c: f64,
    pub atoms: Vec<AtomConfig>,
    #[serde(rename = "T")]
    pub t: f64,
    pub x0: f64,
    pub p: f64,
}

impl From<ModelConfig> for MarketModel {
    fn from(cfg: ModelConfig) -> Self {
        let atoms = cfg
            .atoms
            .iter()
            .map(|a| JumpAtom::new(a.x, a.lambda))
            .collect();
        MarketModel::new(LevyTriplet::new(cfg.b, cfg.c, atoms), cfg.t, cfg.x0, cfg.p)
    }
}

impl From<&MarketModel> for ModelConfig {
    fn from(m: &MarketModel) -> Self {
        ModelConfig {
            b: m.triplet.drift,
            c: m.triplet.diffusion,
            atoms: m
                .triplet
                .atoms
                .iter()
                .map(|a| AtomConfig {
                    x: a.size,
                    lambda: a.intensity,
                })
                .collect(),
            t: m.horizon,
            x0: m.initial_wealth,
            p: m.utility.p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Assumption {
    /// Finite parameters, `c >= 0`, positive intensities, `T > 0`, `x0 > 0`, `p > 0`.
    WellFormed,
    /// `S > 0`: every atom has size `> -1`.
    PositivePrice,
    /// `c != 0` or jumps in both directions.
    DiffusionOrTwoSidedJumps,
    /// `u(x0) < ∞`; automatic for finitely many atoms.
    FiniteValue,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Assumption::WellFormed => "(0) well-formed parameters",
            Assumption::PositivePrice => "(1) positive stock price, all jump sizes > -1",
            Assumption::DiffusionOrTwoSidedJumps => {
                "(2) nonzero diffusion or both positive and negative jumps"
            }
            Assumption::FiniteValue => "(3) finite value function u(x0)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CheckStatus {
    Pass,
    SatisfiedByConstruction,
    Fail(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks
            .iter()
            .filter(|c| matches!(c.status, CheckStatus::Fail(_)))
    }

    pub fn failure_summary(&self) -> String {
        self.failures()
            .map(|c| match &c.status {
                CheckStatus::Fail(msg) => format!("assumption {} violated: {}", c.assumption, msg),
                _ => unreachable!(),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.status {
                CheckStatus::Pass => writeln!(f, "PASS {}", c.assumption)?,
                CheckStatus::SatisfiedByConstruction => {
                    writeln!(f, "PASS {} (finitely many atoms)", c.assumption)?
                }
                CheckStatus::Fail(msg) => writeln!(f, "FAIL {}: {}", c.assumption, msg)?,
            }
        }
        Ok(())
    }
}

pub fn validate_model(model: &MarketModel) -> ValidationReport {
    let t = &model.triplet;
    let mut problems = Vec::new();
    if !t.drift.is_finite() {
        problems.push(format!("drift b = {} is not finite", t.drift));
    }
    if !(t.diffusion >= 0.0 && t.diffusion.is_finite()) {
        problems.push(format!(
            "diffusion c = {} must be finite and >= 0",
            t.diffusion
        ));
    }
    for a in &t.atoms {
        if !(a.intensity > 0.0 && a.intensity.is_finite()) {
            problems.push(format!(
                "atom at {} has intensity {} <= 0",
                a.size, a.intensity
            ));
        }
        if !a.size.is_finite() {
            problems.push(format!("atom size {} is not finite", a.size));
        }
    }
    if !(model.horizon > 0.0 && model.horizon.is_finite()) {
        problems.push(format!("horizon T = {} must be > 0", model.horizon));
    }
    if !(model.initial_wealth > 0.0 && model.initial_wealth.is_finite()) {
        problems.push(format!(
            "initial wealth x0 = {} must be > 0",
            model.initial_wealth
        ));
    }
    if !(model.utility.p > 0.0 && model.utility.p.is_finite()) {
        problems.push(format!("risk aversion p = {} must be > 0", model.utility.p));
    }

    let mut checks = vec![AssumptionCheck {
        assumption: Assumption::WellFormed,
        status: if problems.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(problems.join(", "))
        },
    }];

    let bad: Vec<String> = t
        .atoms
        .iter()
        .filter(|a| a.size.is_nan() || a.size <= -1.0)
        .map(|a| a.size.to_string())
        .collect();
    checks.push(AssumptionCheck {
        assumption: Assumption::PositivePrice,
        status: if bad.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail(format!("jump sizes <= -1: {}", bad.join(", ")))
        },
    });

    let two_sided = t.has_negative_jumps() && t.has_positive_jumps();
    checks.push(AssumptionCheck {
        assumption: Assumption::DiffusionOrTwoSidedJumps,
        status: if t.diffusion != 0.0 || two_sided {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail("c = 0 and the jump measure is one-sided".to_string())
        },
    });

    checks.push(AssumptionCheck {
        assumption: Assumption::FiniteValue,
        status: CheckStatus::SatisfiedByConstruction,
    });

    ValidationReport { checks }
}

/// Triplet of `log E(L)`:
/// `b̃ = b - c/2 + Σ λ_i (log(1+x_i) - x_i)`, `c̃ = c`, atoms at `log(1+x_i)`.
pub fn log_triplet(triplet: &LevyTriplet) -> LogTriplet {
    let mut drift = triplet.drift - triplet.diffusion / 2.0;
    let atoms = triplet
        .atoms
        .iter()
        .map(|a| {
            let y = a.size.ln_1p();
            drift += a.intensity * (y - a.size);
            JumpAtom::new(y, a.intensity)
        })
        .collect();
    LogTriplet {
        drift,
        diffusion: triplet.diffusion,
        atoms,
    }
}

/// `κ(u) = log E[exp(u L̃_1)] = u b̃ + u² c̃/2 + Σ λ_i (e^{u y_i} - 1 - u y_i)`.
///
/// `E[E(L)_t^u] = exp(κ(u) t)`.
pub fn cumulant_exponent(log: &LogTriplet, u: f64) -> f64 {
    let jumps: f64 = log
        .atoms
        .iter()
        .map(|a| a.intensity * ((u * a.size).exp_m1() - u * a.size))
        .sum();
    u * log.drift + 0.5 * u * u * log.diffusion + jumps
}

/// Interval of constant strategies. Infinite ends are `±∞` and always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl AdmissibleInterval {
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Self {
        debug_assert!(lower < upper);
        Self {
            lower,
            upper,
            lower_closed: lower_closed && lower.is_finite(),
            upper_closed: upper_closed && upper.is_finite(),
        }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, true, true)
    }

    pub fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY, false, false)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lower_closed {
            x >= self.lower
        } else {
            x > self.lower
        };
        let below = if self.upper_closed {
            x <= self.upper
        } else {
            x < self.upper
        };
        above && below
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }
}

impl fmt::Display for AdmissibleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lower_closed { '[' } else { '(' },
            self.lower,
            self.upper,
            if self.upper_closed { ']' } else { ')' }
        )
    }
}

/// `{π : 1 + π x_i > 0}` for `p >= 1`, its closure for `p < 1`.
pub fn admissible_set(triplet: &LevyTriplet, utility: &PowerUtility) -> AdmissibleInterval {
    let largest_up = triplet
        .atoms
        .iter()
        .map(|a| a.size)
        .filter(|&x| x > 0.0)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let deepest_down = triplet
        .atoms
        .iter()
        .map(|a| a.size)
        .filter(|&x| x < 0.0)
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    let lower = largest_up.map_or(f64::NEG_INFINITY, |x| -1.0 / x);
    let upper = deepest_down.map_or(f64::INFINITY, |x| -1.0 / x);
    let closed = utility.p < 1.0;
    AdmissibleInterval::new(lower, upper, closed, closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn merton() -> MarketModel {
        MarketModel::new(LevyTriplet::new(0.04, 0.04, vec![]), 1.0, 1.0, 2.0)
    }

    fn two_atom() -> LevyTriplet {
        LevyTriplet::new(
            0.05,
            0.01,
            vec![JumpAtom::new(-0.2, 1.0), JumpAtom::new(0.25, 1.0)],
        )
    }

    #[test]
    fn merton_passes_validation() {
        let report = validate_model(&merton());
        assert!(report.passed(), "{report}");
        assert!(report
            .checks
            .iter()
            .any(|c| c.assumption == Assumption::FiniteValue
                && c.status == CheckStatus::SatisfiedByConstruction));
    }

    #[test]
    fn one_sided_pure_jump_fails_assumption_two() {
        let m = MarketModel::new(
            LevyTriplet::new(0.05, 0.0, vec![JumpAtom::new(0.25, 1.0)]),
            1.0,
            1.0,
            2.0,
        );
        let report = validate_model(&m);
        let failed: Vec<_> = report.failures().map(|c| c.assumption).collect();
        assert_eq!(failed, vec![Assumption::DiffusionOrTwoSidedJumps]);
        assert!(m.ensure_valid().is_err());
    }

    #[test]
    fn jump_below_minus_one_fails_assumption_one() {
        let m = MarketModel::new(
            LevyTriplet::new(0.0, 0.01, vec![JumpAtom::new(-1.2, 0.5)]),
            1.0,
            1.0,
            2.0,
        );
        let failed: Vec<_> = validate_model(&m)
            .failures()
            .map(|c| c.assumption)
            .collect();
        assert_eq!(failed, vec![Assumption::PositivePrice]);
    }

    #[test]
    fn malformed_parameters_are_reported() {
        let mut m = merton();
        m.horizon = 0.0;
        m.utility.p = -1.0;
        let report = validate_model(&m);
        assert!(!report.passed());
        assert!(report.failure_summary().contains("horizon"));
        assert!(report.failure_summary().contains("risk aversion"));
    }

    #[test]
    fn log_triplet_merton() {
        let lt = log_triplet(&merton().triplet);
        assert_relative_eq!(lt.drift, 0.02, max_relative = 1e-15);
        assert_eq!(lt.diffusion, 0.04);
        assert!(lt.atoms.is_empty());
    }

    #[test]
    fn log_triplet_single_atom() {
        let lt = log_triplet(&LevyTriplet::new(0.0, 0.0, vec![JumpAtom::new(0.25, 1.0)]));
        // log(1.25) - 0.25 and log(1.25), 40-digit reference values
        assert_relative_eq!(lt.drift, -0.026_856_448_685_790_244, max_relative = 1e-14);
        assert_relative_eq!(
            lt.atoms[0].size,
            0.223_143_551_314_209_76,
            max_relative = 1e-15
        );
        assert_eq!(lt.atoms[0].intensity, 1.0);
    }

    #[test]
    fn cumulant_anchors() {
        let lt = log_triplet(&merton().triplet);
        assert_eq!(cumulant_exponent(&lt, 0.0), 0.0);
        assert_relative_eq!(cumulant_exponent(&lt, 1.0), 0.04, max_relative = 1e-14);
        assert!(cumulant_exponent(&lt, -1.0).abs() < 1e-17);

        let lt = log_triplet(&two_atom());
        assert_relative_eq!(cumulant_exponent(&lt, 1.0), 0.05, max_relative = 1e-12);
    }

    #[test]
    fn admissible_sets() {
        let u2 = PowerUtility::new(2.0);
        assert_eq!(
            admissible_set(&merton().triplet, &u2),
            AdmissibleInterval::real_line()
        );

        let open = admissible_set(&two_atom(), &u2);
        assert_relative_eq!(open.lower, -4.0);
        assert_relative_eq!(open.upper, 5.0);
        assert!(!open.lower_closed && !open.upper_closed);
        assert!(!open.contains(5.0) && open.contains(4.999));

        let closed = admissible_set(&two_atom(), &PowerUtility::new(0.5));
        assert!(closed.lower_closed && closed.upper_closed);
        assert!(closed.contains(5.0) && closed.contains(-4.0));
    }

    #[test]
    fn config_round_trip_and_unknown_fields() {
        let json = r#"{"b": 0.05, "c": 0.01, "atoms": [{"x": -0.2, "lambda": 1.0}], "T": 2.0, "x0": 3.0, "p": 0.5}"#;
        let m = MarketModel::from_json_str(json).unwrap();
        assert_eq!(m.horizon, 2.0);
        assert_eq!(m.initial_wealth, 3.0);
        assert_eq!(m.triplet.atoms, vec![JumpAtom::new(-0.2, 1.0)]);
        assert_eq!(ModelConfig::from(&m).t, 2.0);

        let bad = r#"{"b": 0.05, "c": 0.01, "atoms": [], "T": 1.0, "x0": 1.0, "p": 2.0, "mu": 1}"#;
        assert!(matches!(
            MarketModel::from_json_str(bad),
            Err(Error::Config(_))
        ));
        let bad_atom = r#"{"b": 0.05, "c": 0.01, "atoms": [{"x": 0.1, "lambda": 1, "y": 0}], "T": 1.0, "x0": 1.0, "p": 2.0}"#;
        assert!(MarketModel::from_json_str(bad_atom).is_err());
    }
}
