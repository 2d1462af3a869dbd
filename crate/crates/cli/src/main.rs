//! `distortion-lab`: run voting rules, compute worst-case distortion, sweep
//! experiments and regenerate the comparison table.
//!
//! Exit codes: 0 success, 1 internal error, 2 unknown rule, 3 invalid
//! instance or config, 4 bad parameters, 5 brute-force disagreement,
//! 6 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use distortion_lab::cardinal::MetricSpace;
use distortion_lab::experiments::{
    reproduce_table, run_sweep, sweep_csv, table_csv, table_text, SweepConfig, TableMode,
};
use distortion_lab::instances::{self, io};
use distortion_lab::lottery::{DistortionValue, Lottery};
use distortion_lab::oracles::{
    completions, distortion, utilitarian_distortion_bruteforce, DistortionReport, OracleConfig, TopTMode, World,
    DEFAULT_BUDGET,
};
use distortion_lab::profile::Ballots;
use distortion_lab::rules::Rule;
use distortion_lab::{exec, Error};

#[derive(Parser)]
#[command(name = "distortion-lab", version, about = "Voting rules and worst-case distortion oracles")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Enumeration budget for brute force and exhaustive search.
    #[arg(long, global = true, env = "DISTORTION_LAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Base seed for random instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a rule and print its lottery.
    Run {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Worst-case distortion of a lottery or rule on one instance.
    Oracle {
        #[arg(long, value_enum)]
        world: WorldArg,
        #[arg(long)]
        instance: PathBuf,
        /// Lottery file; mutually exclusive with `--rule`.
        #[arg(long, conflicts_with = "rule")]
        lottery: Option<PathBuf>,
        #[command(flatten)]
        rule: OptionalRuleArgs,
        /// Cross-check against brute force (utilitarian) or re-verify the witness (metric).
        #[arg(long)]
        check_bruteforce: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        top_t_mode: ModeArg,
    },
    /// Run a JSON-configured sweep and emit CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fill the runtime_ms column (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Worst observed distortion of every table rule in both worlds.
    Reproduce {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Sample this many random profiles instead of enumerating all.
        #[arg(long)]
        sample: Option<usize>,
        /// CSV destination (default: standard output).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a generated instance as JSON.
    Generate {
        #[arg(value_parser = instances::GENERATORS)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: Option<usize>,
        /// dM for `thm53`.
        #[arg(long)]
        dm: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the construction's metric (`thm36`, `thm53`).
        #[arg(long)]
        metric_output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RuleArgs {
    /// Rule id or label, e.g. `plurality_veto` or `ppv(eps=0.5)`.
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    params: RuleParams,
}

#[derive(Args)]
struct OptionalRuleArgs {
    #[arg(long)]
    rule: Option<String>,
    #[command(flatten)]
    params: RuleParams,
}

#[derive(Args)]
struct RuleParams {
    /// Epsilon for `ppv` and `truncated_harmonic` (default 1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Mixing weight of the first rule for `mix`.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    first: Option<String>,
    #[arg(long)]
    second: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorldArg {
    Metric,
    Utilitarian,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Completions,
    Direct,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnknownRule(_) => 2,
            Error::InvalidProfile(_)
            | Error::InvalidCardinal(_)
            | Error::DimensionMismatch(_)
            | Error::EmptyRestriction
            | Error::Parse { .. }
            | Error::Io(_) => 3,
            Error::InvalidParameter(_) | Error::RequiresFullRankings(_) | Error::Divisibility(_) => 4,
            Error::BudgetExceeded { .. } => 6,
            Error::MalformedLp(_) | Error::Internal(_) => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn resolve_rule(label: &str, params: &RuleParams) -> CliResult<Rule> {
    if label.contains('(') {
        return Ok(label.parse()?);
    }
    let mix = if label == "mix" {
        let (Some(first), Some(second), Some(beta)) = (&params.first, &params.second, params.beta) else {
            return Err(Error::InvalidParameter("mix needs --first, --second and --beta".into()).into());
        };
        Some((resolve_rule(first, params)?, resolve_rule(second, params)?, beta))
    } else {
        None
    };
    Ok(Rule::from_id(label, params.epsilon, mix)?)
}

/// Integral probabilities print without a fractional part.
fn number(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        json!(x as i64)
    } else {
        json!(x)
    }
}

fn lottery_json(lot: &Lottery) -> Value {
    json!({ "prob": lot.probs().iter().map(|&p| number(p)).collect::<Vec<_>>() })
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn brute_force(lot: &Lottery, ballots: &Ballots, budget: u128) -> CliResult<DistortionValue> {
    let reports: Vec<DistortionReport> = match ballots {
        Ballots::Full(p) => vec![utilitarian_distortion_bruteforce(lot, p, budget)?],
        Ballots::TopT(p) => {
            let per = (p.m() as u128).checked_pow(p.n() as u32).unwrap_or(u128::MAX);
            let needed = per.saturating_mul(p.completion_count());
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget }.into());
            }
            let all = completions(p);
            exec::map(&all, |c| utilitarian_distortion_bruteforce(lot, c, budget))
                .into_iter()
                .collect::<Result<_, _>>()?
        }
    };
    let mut best = DistortionValue::Finite(0.0);
    for r in reports {
        if r.value.exceeds(best, 0.0) {
            best = r.value;
        }
    }
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    world: World,
    instance: &Path,
    lottery: Option<&Path>,
    rule: &OptionalRuleArgs,
    check: bool,
    mode: TopTMode,
    budget: u128,
) -> CliResult<()> {
    let resolved = match (&rule.rule, lottery) {
        (Some(label), None) => Some(resolve_rule(label, &rule.params)?),
        (None, Some(_)) => None,
        _ => return Err(Error::InvalidParameter("give exactly one of --lottery or --rule".into()).into()),
    };
    let ballots = io::load_instance(instance)?;
    let lot = match (&resolved, lottery) {
        (Some(r), _) => r.apply(&ballots)?,
        (None, Some(path)) => io::load_lottery(path)?,
        _ => unreachable!(),
    };
    let config = OracleConfig { budget, top_t_mode: mode, ..OracleConfig::default() };
    let report = distortion(&lot, &ballots, world, &config)?;
    println!("{}", io::report_json(&report));
    if !check {
        return Ok(());
    }
    match world {
        World::Utilitarian => {
            let brute = brute_force(&lot, &ballots, budget)?;
            if !brute.agrees(report.value, 1e-6) {
                return Err(Failure {
                    code: 5,
                    message: format!("brute force gives {brute}, oracle gives {}", report.value),
                });
            }
        }
        World::Metric => {
            if let Some(w) = &report.witness {
                let replay = w.distortion(&lot);
                let consistent = w.is_consistent(&ballots)?;
                if !consistent || !replay.agrees(report.value, 1e-5 * report.value.as_f64().max(1.0)) {
                    return Err(Failure {
                        code: 5,
                        message: format!(
                            "witness check failed: consistent = {consistent}, replayed {replay}, reported {}",
                            report.value
                        ),
                    });
                }
            }
        }
    }
    eprintln!("check passed");
    Ok(())
}

fn cmd_generate(
    kind: &str,
    (n, m, t, dm): (usize, usize, Option<usize>, Option<f64>),
    seed: u64,
    output: Option<&Path>,
    metric_output: Option<&Path>,
) -> CliResult<()> {
    let need_t = || t.ok_or_else(|| Failure::from(Error::InvalidParameter(format!("`{kind}` needs --t"))));
    let (ballots, metric): (Ballots, Option<MetricSpace>) = match kind {
        "random" => match t {
            Some(t) if t < m => (instances::random_top_t_profile(n, m, t, seed)?.into(), None),
            _ => (instances::random_profile(n, m, seed)?.into(), None),
        },
        "prop31" => (instances::prop31_profile(n, m)?.into(), None),
        "thm36" => {
            let (p, d) = instances::thm36_instance(m, n)?;
            (p.into(), Some(d))
        }
        "thm51" => (instances::thm51_profile(n, m, need_t()?)?.into(), None),
        "thm53" => {
            let dm = dm.ok_or_else(|| Failure::from(Error::InvalidParameter("`thm53` needs --dm".into())))?;
            let (p, d) = instances::thm53_instance(n, m, need_t()?, dm)?;
            (p.into(), Some(d))
        }
        other => return Err(Error::InvalidParameter(format!("unknown generator `{other}`")).into()),
    };
    write_output(output, &(io::instance_json(&ballots) + "\n"))?;
    match (metric_output, metric) {
        (Some(path), Some(d)) => io::save_metric(&d, path)?,
        (Some(_), None) => {
            return Err(Error::InvalidParameter(format!("`{kind}` has no metric to write")).into());
        }
        _ => {}
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let budget = cli.budget;
    match cli.command {
        Command::Run { rule, instance } => {
            let rule = resolve_rule(&rule.rule, &rule.params)?;
            let ballots = io::load_instance(&instance)?;
            let lot = rule.apply(&ballots)?;
            println!("{}", lottery_json(&lot));
            Ok(())
        }
        Command::Oracle { world, instance, lottery, rule, check_bruteforce, top_t_mode } => {
            let world = match world {
                WorldArg::Metric => World::Metric,
                WorldArg::Utilitarian => World::Utilitarian,
            };
            let mode = match top_t_mode {
                ModeArg::Auto => TopTMode::Auto,
                ModeArg::Completions => TopTMode::Completions,
                ModeArg::Direct => TopTMode::Direct,
            };
            cmd_oracle(world, &instance, lottery.as_deref(), &rule, check_bruteforce, mode, budget)
        }
        Command::Sweep { config, output, timings } => {
            let text = fs::read_to_string(&config).map_err(Error::Io)?;
            let cfg = SweepConfig::parse(&text, &config.display().to_string())?;
            let oracle = OracleConfig { budget, ..OracleConfig::default() };
            let rows = run_sweep(&cfg, &oracle, timings)?;
            write_output(output.as_deref(), &sweep_csv(&rows))
        }
        Command::Reproduce { n, m, sample, output } => {
            let mode = match sample {
                Some(k) => TableMode::Sampled { seeds: (0..k as u64).map(|s| cli.seed + s).collect() },
                None => TableMode::Exhaustive,
            };
            let oracle = OracleConfig { budget, ..OracleConfig::default() };
            let rows = reproduce_table(n, m, &mode, &oracle).map_err(|e| match e {
                Error::BudgetExceeded { .. } => Failure { code: 6, message: format!("{e}; pass --sample to sample") },
                other => other.into(),
            })?;
            eprint!("{}", table_text(&rows));
            write_output(output.as_deref(), &table_csv(&rows))
        }
        Command::Generate { kind, n, m, t, dm, output, metric_output } => {
            cmd_generate(&kind, (n, m, t, dm), cli.seed, output.as_deref(), metric_output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let result = if jobs == 0 { run(cli) } else { exec::with_jobs(jobs, || run(cli)) };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
