//! `levy-opt` command line.
//!
//! Every subcommand prints one CSV table on stdout. With `--out DIR` the same
//! table is written to `DIR/<subcommand>.csv` next to a JSON sidecar holding
//! the model, the numerical settings and the full result.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::convergence::{run_convergence_study, ConvergenceSettings, DEFAULT_GRID};
use super::output::{num, write_outputs, CsvTable};
use super::properties::run_property_checks;
use crate::discrete::quadrature::{MAX_JUMP_CONFIGS, POISSON_TAIL};
use crate::discrete::{value_from_gn, GnMethod, McConfig, PeriodLaw, QuadConfig};
use crate::error::{Error, Result};
use crate::model::{validate_model, CheckStatus, MarketModel, ModelConfig};
use crate::objective::continuous_value;
use crate::optimizer::{optimal_continuous, Constraint, BRACKET_TOL, DERIVATIVE_TOL};
use crate::wealth_sim::simulate_coupled_terminals;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "levy-opt",
    version,
    about = "Optimal constant strategies for power utility in exponential Levy models",
    after_help = "Exit status: 0 success, 1 invalid model or config, 2 numerical failure, 64 usage error.\n\
                  Set LEVY_OPT_THREADS to cap worker threads; results do not depend on it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the model assumptions.
    #[command(after_help = "CSV columns: assumption,status,detail")]
    Validate(ValidateArgs),

    /// Continuous-time optimum over [0,1] or the full admissible set.
    #[command(
        after_help = "CSV columns: constraint,pi,g,derivative,derivative_residual,boundary,value"
    )]
    Solve(SolveArgs),

    /// N-period optimum over [0,1].
    #[command(
        name = "solve-discrete",
        after_help = "CSV columns: N,method,pi_N,gN,gN_std_error,derivative,derivative_residual,boundary,value_N"
    )]
    SolveDiscrete(SolveDiscreteArgs),

    /// Convergence of the N-period optimum, objective, value and wealth.
    #[command(
        after_help = "CSV columns: N,pi_N,boundary,gN_at_pi_N,derivative_residual,sup_gap,\
                            value_N,value_gap,l2_gap,l2_gap_se\n\
                            The sidecar also holds the reference row pi_c, g_at_pi_c, value."
    )]
    Converge(ConvergeArgs),

    /// Sign and risk-aversion ordering of the optimal strategies.
    #[command(after_help = "CSV columns: p,pi_p,pi_pN,sign_ok,monotone_ok")]
    Properties(PropertiesArgs),

    /// Coupled Monte Carlo L2 gaps between exact, Euler and N-period wealth.
    #[command(
        name = "wealth-gap",
        after_help = "CSV columns: N,paths,seed,pi_d,pi_c,product_vs_exact,product_vs_exact_se,\
                      euler_vs_exact,euler_vs_exact_se,product_vs_euler,product_vs_euler_se,\
                      euler_nonpositive,product_nonpositive,max_coupling_error"
    )]
    WealthGap(WealthGapArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON model config.
    config: PathBuf,
    /// Also write <subcommand>.csv and <subcommand>.json into this directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstraintArg {
    Unit,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Mc,
    Quad,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// How g^N is evaluated.
    #[arg(long, value_enum, default_value_t = MethodArg::Quad)]
    method: MethodArg,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = McConfig::DEFAULT_PATHS)]
    paths: usize,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pair each Monte Carlo draw with its Gaussian mirror.
    #[arg(long)]
    antithetic: bool,
    /// Gauss-Hermite nodes for quadrature.
    #[arg(long, default_value_t = QuadConfig::default().nodes)]
    nodes: usize,
    /// Jump-count cutoff for quadrature (default: Poisson tail bound).
    #[arg(long, value_name = "K")]
    max_jumps: Option<usize>,
}

impl MethodArgs {
    fn method(&self) -> GnMethod {
        match self.method {
            MethodArg::Mc => {
                GnMethod::Mc(McConfig::new(self.paths, self.seed).antithetic(self.antithetic))
            }
            MethodArg::Quad => GnMethod::Quad(QuadConfig {
                max_jumps: self.max_jumps,
                nodes: self.nodes,
            }),
        }
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// `unit` restricts to [0,1], `none` uses the admissible set.
    #[arg(long, value_enum, default_value_t = ConstraintArg::Unit)]
    constraint: ConstraintArg,
}

#[derive(Debug, Args)]
struct SolveDiscreteArgs {
    #[command(flatten)]
    common: Common,
    /// Number of trading periods.
    #[arg(long = "N", value_name = "N")]
    periods: usize,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: Common,
    /// Strictly ascending period counts.
    #[arg(
        long = "N-list",
        value_name = "N,..",
        value_delimiter = ',',
        required = true
    )]
    periods: Vec<usize>,
    /// Grid cells G for the sup-norm; the grid is {0, 1/G, ..., 1}.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[command(flatten)]
    method: MethodArgs,
    /// Coupled paths for the L2 column, 0 to skip it.
    #[arg(long, default_value_t = McConfig::DEFAULT_PATHS)]
    wealth_paths: usize,
    /// Seed for the coupled paths.
    #[arg(long, default_value_t = 0)]
    wealth_seed: u64,
}

#[derive(Debug, Args)]
struct PropertiesArgs {
    #[command(flatten)]
    common: Common,
    /// Strictly increasing risk-aversion levels.
    #[arg(
        long = "p-list",
        value_name = "p,..",
        value_delimiter = ',',
        required = true
    )]
    p_list: Vec<f64>,
    /// Number of trading periods.
    #[arg(long = "N", value_name = "N", default_value_t = 256)]
    periods: usize,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Debug, Args)]
struct WealthGapArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "N", value_name = "N")]
    periods: usize,
    #[arg(long, default_value_t = McConfig::DEFAULT_PATHS)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    antithetic: bool,
    /// Strategy of the Euler and N-period wealth (default: quadrature pi*_N).
    #[arg(long, allow_hyphen_values = true)]
    pi_d: Option<f64>,
    /// Strategy of the exact wealth (default: pi* on [0,1]).
    #[arg(long, allow_hyphen_values = true)]
    pi_c: Option<f64>,
}

#[derive(Serialize)]
struct Tolerances {
    derivative: f64,
    bracket: f64,
    poisson_tail: f64,
    max_jump_configs: usize,
}

const TOLERANCES: Tolerances = Tolerances {
    derivative: DERIVATIVE_TOL,
    bracket: BRACKET_TOL,
    poisson_tail: POISSON_TAIL,
    max_jump_configs: MAX_JUMP_CONFIGS,
};

#[derive(Serialize)]
struct Sidecar<'a, S: Serialize, R: Serialize> {
    command: &'static str,
    version: &'static str,
    model: ModelConfig,
    settings: S,
    tolerances: &'a Tolerances,
    result: R,
}

/// Output of one subcommand before it is printed.
struct Outcome {
    table: CsvTable,
    sidecar: serde_json::Value,
    exit: i32,
}

fn outcome<S: Serialize, R: Serialize>(
    command: &'static str,
    model: &MarketModel,
    settings: S,
    result: R,
    table: CsvTable,
) -> Result<Outcome> {
    let sidecar = serde_json::to_value(Sidecar {
        command,
        version: env!("CARGO_PKG_VERSION"),
        model: model.into(),
        settings,
        tolerances: &TOLERANCES,
        result,
    })?;
    Ok(Outcome {
        table,
        sidecar,
        exit: EXIT_OK,
    })
}

fn load(path: &Path) -> Result<MarketModel> {
    MarketModel::from_json_file(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidModel(format!("cannot read {}: {io}", path.display())),
        other => other,
    })
}

fn validate(args: &ValidateArgs) -> Result<Outcome> {
    let model = load(&args.common.config)?;
    let report = validate_model(&model);
    let mut t = CsvTable::new(vec!["assumption", "status", "detail"]);
    for c in &report.checks {
        let (status, detail) = match &c.status {
            CheckStatus::Pass => ("pass", String::new()),
            CheckStatus::SatisfiedByConstruction => ("pass", "finitely many atoms".to_string()),
            CheckStatus::Fail(msg) => ("fail", msg.clone()),
        };
        t.push(vec![c.assumption.to_string(), status.into(), detail]);
    }
    let passed = report.passed();
    if !passed {
        eprintln!("{}", report.failure_summary());
    }
    let mut o = outcome("validate", &model, (), &report, t)?;
    if !passed {
        o.exit = EXIT_VALIDATION;
    }
    Ok(o)
}

fn solve(args: &SolveArgs) -> Result<Outcome> {
    let model = load(&args.common.config)?;
    let (constraint, name) = match args.constraint {
        ConstraintArg::Unit => (Constraint::UnitInterval, "unit"),
        ConstraintArg::None => (Constraint::Unconstrained, "none"),
    };
    let r = optimal_continuous(&model, constraint)?;
    let value = continuous_value(&model, r.argmax)?;
    let mut t = CsvTable::new(vec![
        "constraint",
        "pi",
        "g",
        "derivative",
        "derivative_residual",
        "boundary",
        "value",
    ]);
    t.push(vec![
        name.into(),
        num(r.argmax),
        num(r.value),
        num(r.derivative),
        num(r.residual()),
        r.boundary.as_str().into(),
        num(value),
    ]);
    #[derive(Serialize)]
    struct Res<'a> {
        optimum: &'a crate::optimizer::OptResult,
        value: f64,
    }
    outcome("solve", &model, constraint, Res { optimum: &r, value }, t)
}

fn solve_discrete(args: &SolveDiscreteArgs) -> Result<Outcome> {
    let model = load(&args.common.config)?;
    model.ensure_valid()?;
    if args.periods == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let method = args.method.method();
    let law = PeriodLaw::new(&model, args.periods, &method)?;
    let r = law.maximize(&model, args.periods)?;
    let gn = law.gn(&model, args.periods, r.argmax);
    let value = value_from_gn(&model, args.periods, r.value);
    let mut t = CsvTable::new(vec![
        "N",
        "method",
        "pi_N",
        "gN",
        "gN_std_error",
        "derivative",
        "derivative_residual",
        "boundary",
        "value_N",
    ]);
    t.push(vec![
        args.periods.to_string(),
        law.method().as_str().into(),
        num(r.argmax),
        num(r.value),
        num(gn.std_error),
        num(r.derivative),
        num(r.residual()),
        r.boundary.as_str().into(),
        num(value),
    ]);
    #[derive(Serialize)]
    struct Res<'a> {
        optimum: &'a crate::optimizer::OptResult,
        objective: crate::discrete::GnValue,
        value: f64,
    }
    #[derive(Serialize)]
    struct Set {
        periods: usize,
        method: GnMethod,
    }
    outcome(
        "solve-discrete",
        &model,
        Set {
            periods: args.periods,
            method,
        },
        Res {
            optimum: &r,
            objective: gn,
            value,
        },
        t,
    )
}

fn converge(args: &ConvergeArgs) -> Result<Outcome> {
    let model = load(&args.common.config)?;
    let settings = ConvergenceSettings {
        periods: args.periods.clone(),
        grid: args.grid,
        method: args.method.method(),
        wealth: (args.wealth_paths > 0).then(|| McConfig::new(args.wealth_paths, args.wealth_seed)),
    };
    let report = run_convergence_study(&model, &settings)?;
    let table = report.to_csv();
    outcome("converge", &model, &settings, &report, table)
}

fn properties(args: &PropertiesArgs) -> Result<Outcome> {
    let model = load(&args.common.config)?;
    let method = args.method.method();
    let report = run_property_checks(&model, &args.p_list, args.periods, &method)?;
    if !report.all_ok() {
        log::warn!("sign or ordering check failed; see the sign_ok and monotone_ok columns");
    }
    let table = report.to_csv();
    #[derive(Serialize)]
    struct Set<'a> {
        p_list: &'a [f64],
        periods: usize,
        method: GnMethod,
    }
    outcome(
        "properties",
        &model,
        Set {
            p_list: &args.p_list,
            periods: args.periods,
            method,
        },
        &report,
        table,
    )
}

fn wealth_gap(args: &WealthGapArgs) -> Result<Outcome> {
    let model = load(&args.common.config)?;
    model.ensure_valid()?;
    if args.periods == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let pi_d = match args.pi_d {
        Some(pi) => pi,
        None => {
            PeriodLaw::new(&model, args.periods, &GnMethod::default())?
                .maximize(&model, args.periods)?
                .argmax
        }
    };
    let pi_c = match args.pi_c {
        Some(pi) => pi,
        None => optimal_continuous(&model, Constraint::UnitInterval)?.argmax,
    };
    let mc = McConfig::new(args.paths, args.seed).antithetic(args.antithetic);
    let s = simulate_coupled_terminals(&model, pi_d, pi_c, args.periods, &mc)?;
    let mut t = CsvTable::new(vec![
        "N",
        "paths",
        "seed",
        "pi_d",
        "pi_c",
        "product_vs_exact",
        "product_vs_exact_se",
        "euler_vs_exact",
        "euler_vs_exact_se",
        "product_vs_euler",
        "product_vs_euler_se",
        "euler_nonpositive",
        "product_nonpositive",
        "max_coupling_error",
    ]);
    let g = &s.gaps;
    t.push(vec![
        args.periods.to_string(),
        s.paths.to_string(),
        args.seed.to_string(),
        num(pi_d),
        num(pi_c),
        num(g.product_vs_exact.mean),
        num(g.product_vs_exact.std_error),
        num(g.euler_vs_exact.mean),
        num(g.euler_vs_exact.std_error),
        num(g.product_vs_euler.mean),
        num(g.product_vs_euler.std_error),
        s.euler_nonpositive.to_string(),
        s.product_nonpositive.to_string(),
        num(s.max_coupling_error),
    ]);
    #[derive(Serialize)]
    struct Set {
        periods: usize,
        pi_d: f64,
        pi_c: f64,
        mc: McConfig,
    }
    outcome(
        "wealth-gap",
        &model,
        Set {
            periods: args.periods,
            pi_d,
            pi_c,
            mc,
        },
        s,
        t,
    )
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status. The CSV goes to `stdout`, diagnostics to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let (stem, common, result) = match &cli.command {
        Command::Validate(a) => ("validate", &a.common, validate(a)),
        Command::Solve(a) => ("solve", &a.common, solve(a)),
        Command::SolveDiscrete(a) => ("solve-discrete", &a.common, solve_discrete(a)),
        Command::Converge(a) => ("converge", &a.common, converge(a)),
        Command::Properties(a) => ("properties", &a.common, properties(a)),
        Command::WealthGap(a) => ("wealth-gap", &a.common, wealth_gap(a)),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("levy-opt {stem}: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = stdout.write_all(outcome.table.render().as_bytes()) {
        eprintln!("levy-opt {stem}: {e}");
        return EXIT_NUMERICAL;
    }
    if let Some(dir) = &common.out {
        if let Err(e) = write_outputs(dir, stem, &outcome.table, &outcome.sidecar) {
            eprintln!("levy-opt {stem}: {e}");
            return EXIT_NUMERICAL;
        }
    }
    outcome.exit
}
