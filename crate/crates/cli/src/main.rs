//! `qrg`: game values, sparsification experiments, decision predicates and
//! self-checks for one-turn refereed games described in referee files.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qrg_core::circuit::text::parse_referee;
use qrg_core::circuit::{Mode, Referee};
use qrg_core::game::{
    cqrg_value_with, effect_operators, game_value, measurement_operators, mqrg_value_with,
    qrg_value_with, Distribution, GameValueReport, SolverOptions, Strategy,
};
use qrg_core::gap::suite::{run_suite, SuiteReport};
use qrg_core::gap::BitString;
use qrg_core::linalg::trace_product;
use qrg_core::predicates::{exists_pp_decide, trace_power_decide, ExistsDecision, TracePowerCertificate};
use qrg_core::sparsify::{
    check_aly_lemma, check_dependent_hoeffding, referee_process, required_samples, BoundedProcess,
    ExperimentConfig, SparsifyReport, StrategyTuple, TailReport,
};
use qrg_core::Error;

use report::{digest, to_json, write_atomic, InputDigest, RunReport, SCHEMA};

const EXIT_INPUT: u8 = 1;
const EXIT_LIMIT: u8 = 2;

#[derive(Parser)]
#[command(name = "qrg", version, about = "Exact engine for one-turn quantum refereed games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the JSON report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, env = "QRG_SEED", default_value_t = 2024)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Certified game value of a referee.
    Value {
        file: PathBuf,
        /// Expected mode; must agree with the file.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iterations: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sampling experiment for replacing Alice's optimal distribution by a
    /// uniform choice among N samples.
    Sparsify {
        file: PathBuf,
        /// Tuple length; defaults to 72(m + 2).
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 1.0 / 12.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Trace-power test on one tuple, or search over all tuples of length N.
    Predicate {
        file: PathBuf,
        /// Comma-separated messages y1,...,yN.
        #[arg(long, conflicts_with = "exists", required_unless_present = "exists")]
        tuple: Option<String>,
        #[arg(long, requires = "n")]
        exists: bool,
        #[arg(long = "N")]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Checks every gap-function combinator against direct evaluation.
    GapCheck {
        #[arg(long, value_enum, default_value_t = Suite::Default)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Tail frequency of a bounded process against exp(-2 n eps^2).
    Tailbound {
        #[arg(long, value_enum)]
        process: ProcessArg,
        /// Referee file for `--process referee`.
        #[arg(long, required_if_eq("process", "referee"))]
        referee: Option<PathBuf>,
        #[arg(long, default_value_t = 144)]
        n: usize,
        /// Conditional-mean bound; the referee process derives its own.
        #[arg(long, default_value_t = 0.25)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0 / 12.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Qrg,
    Cqrg,
    Mqrg,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Qrg => Mode::Qrg,
            ModeArg::Cqrg => Mode::Cqrg,
            ModeArg::Mqrg => Mode::Mqrg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// 100 instances per combinator.
    Default,
    /// 10 instances per combinator.
    Quick,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcessArg {
    Iid,
    Markov,
    Referee,
}

/// A failed run: exit code and message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } | Error::DimensionCap { .. } => EXIT_LIMIT,
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

fn input_err(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

fn load_referee(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<Referee, Failure> {
    let bytes = fs::read(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    inputs.push(digest(path, &bytes));
    let text = String::from_utf8(bytes).map_err(|_| input_err(format!("{}: not UTF-8", path.display())))?;
    parse_referee(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// Result payload plus the exit code it implies.
struct Outcome<T> {
    results: T,
    summary: String,
    code: u8,
}

fn finish<T: Serialize>(
    command: &'static str,
    common: &Common,
    inputs: Vec<InputDigest>,
    start: Instant,
    outcome: Outcome<T>,
) -> Result<u8, Failure> {
    let report = RunReport {
        schema: SCHEMA,
        command,
        inputs,
        seed: common.seed,
        results: outcome.results,
        wall_time: common.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let json = to_json(&report).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
    match &common.out {
        Some(path) => {
            write_atomic(path, &json).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            println!("{}", outcome.summary);
        }
        None => print!("{json}"),
    }
    Ok(outcome.code)
}

fn value(r: &Referee, mode: Option<ModeArg>, tol: f64, max_iterations: usize) -> Result<Outcome<GameValueReport>, Failure> {
    if let Some(m) = mode {
        let m = Mode::from(m);
        if m != r.mode() {
            return Err(input_err(format!("--mode {m} but the file declares {}", r.mode())));
        }
    }
    if !(tol > 0.0) {
        return Err(input_err("--tol must be positive"));
    }
    let opts = SolverOptions {
        tol,
        max_iterations,
        ..SolverOptions::default()
    };
    let rep = match r.mode() {
        Mode::Qrg => qrg_value_with(r, &opts)?,
        Mode::Cqrg => cqrg_value_with(r, &opts)?,
        Mode::Mqrg => mqrg_value_with(r, &opts)?,
    };
    let summary = format!(
        "value {:.6} in [{:.6}, {:.6}], gap {:.2e} after {} iterations{}",
        rep.value,
        rep.lower,
        rep.upper,
        rep.duality_gap,
        rep.iterations,
        if rep.converged { "" } else { " (not converged)" }
    );
    let code = if rep.converged { 0 } else { EXIT_LIMIT };
    Ok(Outcome { results: rep, summary, code })
}

/// Alice's certified distribution over the messages the effect operators
/// are indexed by: her strategy for CQRG, the outcome distribution of her
/// state for MQRG.
fn alice_distribution(r: &Referee, rep: &GameValueReport) -> Result<Distribution, Failure> {
    match (&rep.alice_strategy, r.p_circuit()) {
        (Strategy::Distribution(p), _) => Ok(p.clone()),
        (Strategy::Density(rho), Some(p)) => {
            let w: Vec<f64> = measurement_operators(p)?
                .iter()
                .map(|m| trace_product(&m.to_dmatrix(), rho.matrix()).max(0.0))
                .collect();
            Ok(Distribution::from_weights(r.outcome(), &w)?)
        }
        _ => Err(Error::UnsupportedMode("qrg").into()),
    }
}

#[derive(Serialize)]
struct SparsifyResults {
    game: GameValueReport,
    alice_distribution: Distribution,
    required_samples: usize,
    exploratory: bool,
    experiment: SparsifyReport,
}

fn sparsify(
    r: &Referee,
    n: Option<usize>,
    trials: usize,
    epsilon: f64,
    tol: f64,
    seed: u64,
) -> Result<Outcome<SparsifyResults>, Failure> {
    if r.mode() == Mode::Qrg {
        return Err(input_err("sparsify needs a cqrg or mqrg referee"));
    }
    let s = effect_operators(r)?;
    let game = game_value(r, tol)?;
    let p = alice_distribution(r, &game)?;
    let needed = required_samples(r.bob());
    let n = n.unwrap_or(needed);
    let cfg = ExperimentConfig {
        trials,
        samples: n,
        epsilon,
        gamma: 0.0,
        seed,
    };
    let exp = check_aly_lemma(&s, &p, &cfg)?;
    let mut summary = format!(
        "failure rate {:.4} over {} trials (target {:.4}, bound {:.4}): {}",
        exp.failure_rate,
        trials,
        exp.target,
        exp.analytic_bound,
        if exp.within_target { "pass" } else { "fail" }
    );
    if !exp.precondition_met {
        summary.push_str(&format!("\nwarning: N = {n} is below 72(m + 2) = {needed}; exploratory run"));
    }
    Ok(Outcome {
        results: SparsifyResults {
            game,
            alice_distribution: p,
            required_samples: needed,
            exploratory: !exp.precondition_met,
            experiment: exp,
        },
        summary,
        code: 0,
    })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PredicateResults {
    Tuple {
        tuple: StrategyTuple,
        certificate: TracePowerCertificate,
    },
    Exists {
        samples: usize,
        decision: ExistsDecision,
    },
}

fn parse_tuple(src: &str) -> Result<StrategyTuple, Failure> {
    let strings = src
        .split(',')
        .map(|s| s.trim().parse::<BitString>().map_err(|e| input_err(format!("bad tuple entry `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StrategyTuple::new(strings)?)
}

fn predicate(r: &Referee, tuple: Option<&str>, n: Option<usize>) -> Result<Outcome<PredicateResults>, Failure> {
    let (results, summary) = match (tuple, n) {
        (Some(t), _) => {
            let tuple = parse_tuple(t)?;
            let c = trace_power_decide(r, &tuple)?;
            let summary = format!("{} (H = {}, K = {})", if c.accept { "accept" } else { "reject" }, c.h_value, c.k_value);
            (PredicateResults::Tuple { tuple, certificate: c }, summary)
        }
        (None, Some(n)) => {
            let d = exists_pp_decide(r, n)?;
            let summary = format!(
                "{} after {} tuples",
                if d.accept { "accept" } else { "reject" },
                d.tuples_checked
            );
            (PredicateResults::Exists { samples: n, decision: d }, summary)
        }
        (None, None) => return Err(input_err("give --tuple or --exists --N")),
    };
    Ok(Outcome { results, summary, code: 0 })
}

fn gap_check(suite: Suite, seed: u64) -> Result<Outcome<SuiteReport>, Failure> {
    let per_check = match suite {
        Suite::Default => 100,
        Suite::Quick => 10,
    };
    let rep = run_suite(seed, per_check)?;
    let summary = rep
        .checks
        .iter()
        .map(|c| {
            format!(
                "{:<20} {:>5} instances {:>12} witnesses  {}",
                c.name,
                c.instances,
                c.witnesses,
                if c.passed() { "pass" } else { "FAIL" }
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let code = if rep.passed { 0 } else { EXIT_INPUT };
    Ok(Outcome { results: rep, summary, code })
}

#[derive(Serialize)]
struct TailResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    game: Option<GameValueReport>,
    experiment: TailReport,
}

fn tailbound(
    process: ProcessArg,
    referee: Option<&Referee>,
    cfg: ExperimentConfig,
) -> Result<Outcome<TailResults>, Failure> {
    let (proc, game) = match process {
        ProcessArg::Iid => (BoundedProcess::Iid { gamma: cfg.gamma }, None),
        ProcessArg::Markov => (BoundedProcess::Markov { gamma: cfg.gamma }, None),
        ProcessArg::Referee => {
            let r = referee.ok_or_else(|| input_err("--process referee needs --referee FILE"))?;
            if r.mode() == Mode::Qrg {
                return Err(input_err("the referee process needs a cqrg or mqrg referee"));
            }
            let game = game_value(r, 1e-4)?;
            let p = alice_distribution(r, &game)?;
            let s = effect_operators(r)?;
            (referee_process(&s, &p, game.bob_strategy.matrix())?, Some(game))
        }
    };
    let exp = check_dependent_hoeffding(&proc, &cfg)?;
    let mut summary = format!(
        "{}: tail {:.5} vs bound {:.5} (gamma {:.4}): {}",
        exp.process,
        exp.empirical,
        exp.bound,
        exp.gamma,
        if exp.within_bound { "pass" } else { "fail" }
    );
    if let Some(t) = exp.exact_tail {
        summary.push_str(&format!("\nexact binomial tail {t:.5}"));
    }
    Ok(Outcome {
        results: TailResults { game, experiment: exp },
        summary,
        code: 0,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut inputs = Vec::new();
    match cli.command {
        Command::Value { file, mode, tol, max_iterations, common } => {
            let r = load_referee(&file, &mut inputs)?;
            let out = value(&r, mode, tol, max_iterations)?;
            finish("value", &common, inputs, start, out)
        }
        Command::Sparsify { file, n, trials, epsilon, tol, common } => {
            let r = load_referee(&file, &mut inputs)?;
            let out = sparsify(&r, n, trials, epsilon, tol, common.seed)?;
            finish("sparsify", &common, inputs, start, out)
        }
        Command::Predicate { file, tuple, exists, n, common } => {
            let r = load_referee(&file, &mut inputs)?;
            let out = predicate(&r, tuple.as_deref(), if exists { n } else { None })?;
            finish("predicate", &common, inputs, start, out)
        }
        Command::GapCheck { suite, common } => {
            let out = gap_check(suite, common.seed)?;
            finish("gap-check", &common, inputs, start, out)
        }
        Command::Tailbound { process, referee, n, gamma, epsilon, trials, common } => {
            let r = referee.as_deref().map(|p| load_referee(p, &mut inputs)).transpose()?;
            let cfg = ExperimentConfig {
                trials,
                samples: n,
                epsilon,
                gamma,
                seed: common.seed,
            };
            let out = tailbound(process, r.as_ref(), cfg)?;
            finish("tailbound", &common, inputs, start, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
