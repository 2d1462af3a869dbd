//! Worst-case distortion oracles.
//!
//! For a fixed lottery and ordinal input, the oracles compute the supremum
//! of the distortion over every consistent cardinal instance, by linear
//! programming over one candidate optimum at a time:
//!
//! * metric world: variables are the agent-to-alternative distances, with
//!   the quadrilateral rows `d(i,X) <= d(i,Y) + d(j,Y) + d(j,X)` that make a
//!   bipartite grid extendable to a pseudometric;
//! * utilitarian world: the linear-fractional program over unit-sum
//!   utilities is homogenized (scaled utilities plus a scale variable).
//!
//! A brute-force twin for the utilitarian world enumerates the vertices of
//! the per-agent consistency polytopes instead.

mod exhaustive;
mod metric;
mod utilitarian;

pub use exhaustive::{all_profiles, exhaustive_worst_case, profile_count};
pub use metric::metric_distortion;
pub use utilitarian::{utilitarian_distortion, utilitarian_distortion_bruteforce};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cardinal::{MetricSpace, UtilityProfile};
use crate::lottery::{DistortionValue, Lottery};
use crate::profile::{Ballots, Profile};
use crate::rules::Rule;
use crate::{exec, tol, Error, Result};

/// Which cardinal model the distortion is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum World {
    Metric,
    Utilitarian,
}

impl World {
    pub fn as_str(self) -> &'static str {
        match self {
            World::Metric => "metric",
            World::Utilitarian => "utilitarian",
        }
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for World {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(World::Metric),
            "utilitarian" => Ok(World::Utilitarian),
            other => Err(Error::InvalidParameter(format!("unknown world `{other}`"))),
        }
    }
}

/// How top-t ballots are handled by the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TopTMode {
    /// Completions when within budget, otherwise the direct encoding.
    #[default]
    Auto,
    /// Maximum over every completion to full rankings.
    Completions,
    /// One LP whose consistency rows encode the prefix semantics.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Work limit for brute force and exhaustive profile enumeration.
    pub budget: u128,
    /// Limit on completions enumerated for one top-t profile.
    pub completion_budget: u128,
    pub top_t_mode: TopTMode,
}

pub const DEFAULT_BUDGET: u128 = 1_000_000;
pub const DEFAULT_COMPLETION_BUDGET: u128 = 100_000;

impl Default for OracleConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, completion_budget: DEFAULT_COMPLETION_BUDGET, top_t_mode: TopTMode::Auto }
    }
}

/// The cardinal instance attaining (or, when unbounded, witnessing) a
/// reported distortion.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Metric(MetricSpace),
    Utility(UtilityProfile),
}

impl Witness {
    pub fn distortion(&self, lot: &Lottery) -> DistortionValue {
        use crate::lottery::eval_distortion;
        match self {
            Witness::Metric(d) => eval_distortion(lot, d),
            Witness::Utility(u) => eval_distortion(lot, u),
        }
    }

    pub fn is_consistent(&self, ballots: &Ballots) -> Result<bool> {
        match self {
            Witness::Metric(d) => crate::cardinal::is_metric_consistent(d, ballots),
            Witness::Utility(u) => crate::cardinal::is_utility_consistent(u, ballots),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub value: DistortionValue,
    /// The candidate optimum whose subproblem attains `value`.
    pub arg_optimum: usize,
    pub witness: Option<Witness>,
}

/// Candidate-optimum reduction: unbounded wins, then the larger value;
/// ties (within the structural tolerance) keep the lower index.
pub(crate) fn reduce(reports: Vec<DistortionReport>) -> Result<DistortionReport> {
    let mut best: Option<DistortionReport> = None;
    for r in reports {
        best = match best {
            None => Some(r),
            Some(b) if r.value.exceeds(b.value, tol::STRUCTURAL) => Some(r),
            keep => keep,
        };
    }
    best.ok_or_else(|| Error::Internal("no candidate optimum".into()))
}

fn check_compatible(lot: &Lottery, ballots: &Ballots) -> Result<()> {
    if lot.m() != ballots.m() {
        return Err(Error::DimensionMismatch(format!(
            "lottery over {} alternatives, ballots over {}",
            lot.m(),
            ballots.m()
        )));
    }
    Ok(())
}

/// Runs `oracle` on every completion of top-t ballots (or once on full
/// ballots) and keeps the worst case.
pub(crate) fn over_completions(
    lot: &Lottery,
    ballots: &Ballots,
    config: &OracleConfig,
    oracle: impl Fn(&Ballots) -> Result<DistortionReport> + Sync + Send,
) -> Result<DistortionReport> {
    check_compatible(lot, ballots)?;
    let Ballots::TopT(p) = ballots else {
        return oracle(ballots);
    };
    let count = p.completion_count();
    let enumerate = match config.top_t_mode {
        TopTMode::Direct => false,
        TopTMode::Auto => count <= config.completion_budget,
        TopTMode::Completions => {
            if count > config.completion_budget {
                return Err(Error::BudgetExceeded { needed: count, budget: config.completion_budget });
            }
            true
        }
    };
    if !enumerate || p.t() == p.m() {
        return oracle(ballots);
    }
    let completions = completions(p);
    let reports = exec::map(&completions, |c| oracle(&Ballots::Full(c.clone())));
    reduce(reports.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Every full profile whose rankings extend the given prefixes.
pub fn completions(p: &crate::profile::TopTProfile) -> Vec<Profile> {
    let tails: Vec<Vec<Vec<usize>>> = (0..p.n()).map(|i| permutations(&p.unranked(i))).collect();
    let total: usize = tails.iter().map(Vec::len).product();
    (0..total)
        .map(|mut idx| {
            let rankings = (0..p.n())
                .map(|i| {
                    let k = idx % tails[i].len();
                    idx /= tails[i].len();
                    let mut r = p.prefix(i).to_vec();
                    r.extend_from_slice(&tails[i][k]);
                    r
                })
                .collect();
            Profile::from_rankings(p.m(), rankings).expect("completion is a permutation")
        })
        .collect()
}

/// All orderings of `items`, lexicographic by position.
pub(crate) fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Worst-case distortion of a fixed lottery in either world.
pub fn distortion(lot: &Lottery, ballots: &Ballots, world: World, config: &OracleConfig) -> Result<DistortionReport> {
    match world {
        World::Metric => metric_distortion(lot, ballots, config),
        World::Utilitarian => utilitarian_distortion(lot, ballots, config),
    }
}

/// The rule's lottery on `ballots`, scored by the matching oracle.
pub fn rule_distortion(
    rule: &Rule,
    ballots: &Ballots,
    world: World,
    config: &OracleConfig,
) -> Result<DistortionReport> {
    let lot = rule.apply(ballots)?;
    distortion(&lot, ballots, world, config)
}
