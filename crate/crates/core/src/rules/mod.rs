//! Voting rules. Every rule maps ballots to a [`Lottery`]; deterministic
//! rules return a point mass. Ties always break to the lowest index.

mod harmonic;
mod plurality;
mod top_t;
mod veto;

use std::fmt;
use std::str::FromStr;

pub use harmonic::{
    harmonic_rule, truncated_harmonic, truncated_harmonic_at, truncated_weights, TruncatedWeightFunction,
};
pub use plurality::{copeland, copeland_scores, plurality, plurality_winner, random_dictatorship};
pub use top_t::{
    top_t_det_rule, top_t_truncated_harmonic, top_t_truncated_harmonic_with, FixedAnchor, RestrictedPluralityVeto,
    TopTDeterministic, TopTSelector,
};
pub use veto::{
    plurality_veto, plurality_veto_top_t_trace, plurality_veto_trace, pruned_plurality_veto, pruned_set, VetoEvent,
    VetoTrace,
};

use crate::lottery::Lottery;
use crate::profile::{Ballots, Profile};
use crate::{Error, Result};

/// Stable rule identifiers.
pub const RULE_IDS: [&str; 10] = [
    "plurality",
    "copeland",
    "plurality_veto",
    "ppv",
    "random_dictatorship",
    "harmonic",
    "truncated_harmonic",
    "top_t_det",
    "top_t_th",
    "mix",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Plurality,
    Copeland,
    PluralityVeto,
    PrunedPluralityVeto { epsilon: f64 },
    RandomDictatorship,
    Harmonic,
    TruncatedHarmonic { epsilon: f64 },
    TopTDet,
    TopTTruncatedHarmonic,
    Mix { first: Box<Rule>, second: Box<Rule>, beta: f64 },
}

/// `beta * first + (1 - beta) * second`.
pub fn mix(first: &Lottery, second: &Lottery, beta: f64) -> Result<Lottery> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {beta}")));
    }
    if first.m() != second.m() {
        return Err(Error::DimensionMismatch(format!(
            "mixing lotteries over {} and {} alternatives",
            first.m(),
            second.m()
        )));
    }
    if beta == 1.0 {
        return Ok(first.clone());
    }
    if beta == 0.0 {
        return Ok(second.clone());
    }
    let prob = first.probs().iter().zip(second.probs()).map(|(a, b)| beta * a + (1.0 - beta) * b).collect();
    Lottery::normalized(prob)
}

impl Rule {
    pub fn id(&self) -> &'static str {
        match self {
            Rule::Plurality => "plurality",
            Rule::Copeland => "copeland",
            Rule::PluralityVeto => "plurality_veto",
            Rule::PrunedPluralityVeto { .. } => "ppv",
            Rule::RandomDictatorship => "random_dictatorship",
            Rule::Harmonic => "harmonic",
            Rule::TruncatedHarmonic { .. } => "truncated_harmonic",
            Rule::TopTDet => "top_t_det",
            Rule::TopTTruncatedHarmonic => "top_t_th",
            Rule::Mix { .. } => "mix",
        }
    }

    /// Builds a rule from its identifier. `epsilon` defaults to 1; `mix`
    /// needs both components and `beta`.
    pub fn from_id(id: &str, epsilon: Option<f64>, mix: Option<(Rule, Rule, f64)>) -> Result<Rule> {
        let eps = epsilon.unwrap_or(1.0);
        let rule = match id {
            "plurality" => Rule::Plurality,
            "copeland" => Rule::Copeland,
            "plurality_veto" => Rule::PluralityVeto,
            "ppv" => Rule::PrunedPluralityVeto { epsilon: eps },
            "random_dictatorship" => Rule::RandomDictatorship,
            "harmonic" => Rule::Harmonic,
            "truncated_harmonic" => Rule::TruncatedHarmonic { epsilon: eps },
            "top_t_det" => Rule::TopTDet,
            "top_t_th" => Rule::TopTTruncatedHarmonic,
            "mix" => {
                let (first, second, beta) =
                    mix.ok_or_else(|| Error::InvalidParameter("mix needs two component rules and beta".into()))?;
                Rule::Mix { first: Box::new(first), second: Box::new(second), beta }
            }
            other => return Err(Error::UnknownRule(other.to_string())),
        };
        rule.check_params()?;
        Ok(rule)
    }

    pub fn check_params(&self) -> Result<()> {
        match self {
            Rule::PrunedPluralityVeto { epsilon } => veto::check_epsilon(*epsilon),
            Rule::TruncatedHarmonic { epsilon } => harmonic::check_open_epsilon(*epsilon),
            Rule::Mix { first, second, beta } => {
                if !(0.0..=1.0).contains(beta) {
                    return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {beta}")));
                }
                if matches!(**first, Rule::Mix { .. }) || matches!(**second, Rule::Mix { .. }) {
                    return Err(Error::InvalidParameter("nested mix is not supported".into()));
                }
                first.check_params()?;
                second.check_params()
            }
            _ => Ok(()),
        }
    }

    /// Whether the rule accepts top-t ballots.
    pub fn accepts_top_t(&self) -> bool {
        match self {
            Rule::Plurality | Rule::RandomDictatorship | Rule::TopTDet | Rule::TopTTruncatedHarmonic => true,
            Rule::Mix { first, second, .. } => first.accepts_top_t() && second.accepts_top_t(),
            _ => false,
        }
    }

    pub fn apply(&self, ballots: &Ballots) -> Result<Lottery> {
        self.check_params()?;
        match self {
            Rule::Plurality => Ok(plurality(ballots)),
            Rule::RandomDictatorship => Ok(random_dictatorship(ballots)),
            Rule::Copeland => Ok(copeland(self.full(ballots)?)),
            Rule::PluralityVeto => Ok(plurality_veto(self.full(ballots)?).0),
            Rule::PrunedPluralityVeto { epsilon } => pruned_plurality_veto(self.full(ballots)?, *epsilon),
            Rule::Harmonic => Ok(harmonic_rule(self.full(ballots)?)),
            Rule::TruncatedHarmonic { epsilon } => truncated_harmonic(self.full(ballots)?, *epsilon),
            Rule::TopTDet => top_t_det_rule(&ballots.to_top_t()),
            Rule::TopTTruncatedHarmonic => top_t_truncated_harmonic(&ballots.to_top_t()),
            Rule::Mix { first, second, beta } => mix(&first.apply(ballots)?, &second.apply(ballots)?, *beta),
        }
    }

    fn full<'a>(&self, ballots: &'a Ballots) -> Result<&'a Profile> {
        ballots.as_full().ok_or(Error::RequiresFullRankings(self.id()))
    }
}

/// Comma-free label, e.g. `ppv(eps=1)` or `mix(random_dictatorship|harmonic;beta=0.25)`.
impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::PrunedPluralityVeto { epsilon } | Rule::TruncatedHarmonic { epsilon } => {
                write!(f, "{}(eps={epsilon})", self.id())
            }
            Rule::Mix { first, second, beta } => write!(f, "mix({first}|{second};beta={beta})"),
            _ => f.write_str(self.id()),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        let s = s.trim();
        let Some(open) = s.find('(') else {
            return Rule::from_id(s, None, None);
        };
        let (id, rest) = (&s[..open], &s[open + 1..]);
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::InvalidParameter(format!("unbalanced parentheses in `{s}`")))?;
        let number = |text: &str, key: &str| -> Result<f64> {
            text.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("expected `{key}=<number>` in `{s}`")))
        };
        if id == "mix" {
            let (rules, beta) =
                inner.rsplit_once(';').ok_or_else(|| Error::InvalidParameter(format!("expected `;beta=` in `{s}`")))?;
            let (a, b) = rules
                .split_once('|')
                .ok_or_else(|| Error::InvalidParameter(format!("expected `first|second` in `{s}`")))?;
            return Rule::from_id("mix", None, Some((a.parse()?, b.parse()?, number(beta, "beta")?)));
        }
        if !RULE_IDS.contains(&id) {
            return Err(Error::UnknownRule(id.to_string()));
        }
        Rule::from_id(id, Some(number(inner, "eps")?), None)
    }
}
