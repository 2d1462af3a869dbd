//! Sweep and table drivers behind the command line.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Deserialize;

use crate::instances::random_profile;
use crate::lottery::DistortionValue;
use crate::oracles::{exhaustive_worst_case, profile_count, rule_distortion, OracleConfig, World};
use crate::profile::Ballots;
use crate::rules::Rule;
use crate::{exec, tol, Error, Result};

/// One `(n, m, t)` point; `t` defaults to `m` (full rankings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub t: Option<usize>,
}

impl GridPoint {
    pub fn t(&self) -> usize {
        self.t.unwrap_or(self.m)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweepConfig {
    rules: Vec<String>,
    grid: Vec<GridPoint>,
    seeds: Vec<u64>,
    worlds: Vec<World>,
}

/// A validated sweep: every rule label parsed and every grid point usable
/// by every rule.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub rules: Vec<Rule>,
    pub grid: Vec<GridPoint>,
    pub seeds: Vec<u64>,
    pub worlds: Vec<World>,
}

impl SweepConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let raw: RawSweepConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.into(), message: e.to_string() })?;
        let config_error = |message: String| Error::Parse { path: origin.into(), message };
        let rules = raw
            .rules
            .iter()
            .map(|s| s.parse::<Rule>().map_err(|e| config_error(format!("rule `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        for g in &raw.grid {
            if g.n == 0 || g.m == 0 || g.t() == 0 || g.t() > g.m {
                return Err(config_error(format!("invalid grid point n = {}, m = {}, t = {}", g.n, g.m, g.t())));
            }
            if g.t() < g.m {
                if let Some(r) = rules.iter().find(|r| !r.accepts_top_t()) {
                    return Err(config_error(format!(
                        "rule `{r}` requires full rankings but grid point n = {}, m = {} has t = {}",
                        g.n,
                        g.m,
                        g.t()
                    )));
                }
            }
        }
        for (name, empty) in [
            ("rules", rules.is_empty()),
            ("grid", raw.grid.is_empty()),
            ("seeds", raw.seeds.is_empty()),
            ("worlds", raw.worlds.is_empty()),
        ] {
            if empty {
                return Err(config_error(format!("`{name}` must not be empty")));
            }
        }
        Ok(SweepConfig { rules, grid: raw.grid, seeds: raw.seeds, worlds: raw.worlds })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rule: String,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub seed: u64,
    pub world: World,
    pub distortion: DistortionValue,
    pub arg_optimum: usize,
    pub runtime_ms: Option<f64>,
}

pub const SWEEP_HEADER: &str = "rule,n,m,t,seed,world,distortion,arg_optimum,runtime_ms";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let runtime = self.runtime_ms.map(|r| format!("{r:.3}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.rule,
            self.n,
            self.m,
            self.t,
            self.seed,
            self.world,
            self.distortion.to_csv(),
            self.arg_optimum,
            runtime
        )
    }
}

/// The ballots a sweep uses for one grid point and seed.
pub fn sweep_instance(point: &GridPoint, seed: u64) -> Result<Ballots> {
    let p = random_profile(point.n, point.m, seed)?;
    Ok(if point.t() < point.m { p.truncate(point.t())?.into() } else { p.into() })
}

/// Runs every (rule, grid point, seed, world) cell. Rows come back sorted
/// by column order however the work was scheduled.
pub fn run_sweep(config: &SweepConfig, oracle: &OracleConfig, timings: bool) -> Result<Vec<SweepRow>> {
    let mut cells = Vec::new();
    for rule in &config.rules {
        for point in &config.grid {
            for &seed in &config.seeds {
                for &world in &config.worlds {
                    cells.push((rule, *point, seed, world));
                }
            }
        }
    }
    let rows = exec::map(&cells, |&(rule, point, seed, world)| -> Result<SweepRow> {
        let ballots = sweep_instance(&point, seed)?;
        let start = Instant::now();
        let report = rule_distortion(rule, &ballots, world, oracle)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        Ok(SweepRow {
            rule: rule.to_string(),
            n: point.n,
            m: point.m,
            t: point.t(),
            seed,
            world,
            distortion: report.value,
            arg_optimum: report.arg_optimum,
            runtime_ms: timings.then_some(elapsed),
        })
    });
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (&a.rule, a.n, a.m, a.t, a.seed, a.world.as_str()).cmp(&(&b.rule, b.n, b.m, b.t, b.seed, b.world.as_str()))
    });
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Rules in the comparison table, with default parameters.
pub fn table_rules() -> Vec<Rule> {
    vec![
        Rule::Plurality,
        Rule::Copeland,
        Rule::PluralityVeto,
        Rule::PrunedPluralityVeto { epsilon: 1.0 },
        Rule::RandomDictatorship,
        Rule::Harmonic,
        Rule::TruncatedHarmonic { epsilon: 1.0 },
    ]
}

/// How the table's profiles are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum TableMode {
    Exhaustive,
    Sampled { seeds: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub rule: String,
    pub metric: DistortionValue,
    pub utilitarian: DistortionValue,
    pub profiles: u128,
}

/// Worst observed distortion of each table rule in both worlds.
pub fn reproduce_table(n: usize, m: usize, mode: &TableMode, oracle: &OracleConfig) -> Result<Vec<TableRow>> {
    let count = match mode {
        TableMode::Exhaustive => {
            let needed = profile_count(n, m, None);
            if needed > oracle.budget {
                return Err(Error::BudgetExceeded { needed, budget: oracle.budget });
            }
            needed
        }
        TableMode::Sampled { seeds } => seeds.len() as u128,
    };
    let samples = match mode {
        TableMode::Exhaustive => Vec::new(),
        TableMode::Sampled { seeds } => {
            seeds.iter().map(|&s| random_profile(n, m, s).map(Ballots::from)).collect::<Result<Vec<_>>>()?
        }
    };
    let worst = |rule: &Rule, world: World| -> Result<DistortionValue> {
        match mode {
            TableMode::Exhaustive => Ok(exhaustive_worst_case(rule, n, m, world, None, oracle)?.0),
            TableMode::Sampled { .. } => {
                let values = exec::map(&samples, |b| rule_distortion(rule, b, world, oracle).map(|r| r.value));
                let mut best = DistortionValue::Finite(0.0);
                for v in values {
                    let v = v?;
                    if v.exceeds(best, tol::STRUCTURAL) {
                        best = v;
                    }
                }
                Ok(best)
            }
        }
    };
    table_rules()
        .iter()
        .map(|rule| {
            Ok(TableRow {
                rule: rule.to_string(),
                metric: worst(rule, World::Metric)?,
                utilitarian: worst(rule, World::Utilitarian)?,
                profiles: count,
            })
        })
        .collect()
}

pub const TABLE_HEADER: &str = "rule,metric,utilitarian,profiles";

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.rule, r.metric.to_csv(), r.utilitarian.to_csv(), r.profiles);
    }
    out
}

/// Aligned plain-text rendering; unbounded cells read `unbounded`.
pub fn table_text(rows: &[TableRow]) -> String {
    let cell = |v: DistortionValue| match v {
        DistortionValue::Finite(x) => format!("{x:.4}"),
        DistortionValue::Unbounded => "unbounded".to_string(),
    };
    let width = rows.iter().map(|r| r.rule.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:>12}  {:>12}\n", "rule", "metric", "utilitarian");
    for r in rows {
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}", r.rule, cell(r.metric), cell(r.utilitarian));
    }
    out
}
