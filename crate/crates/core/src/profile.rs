//! Ordinal input: full rankings and top-t prefixes.

use std::fmt;

use crate::{Error, Result};

/// A problem found while validating raw ballots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoAgents,
    NoAlternatives,
    AgentCount { declared: usize, found: usize },
    PrefixLength { t: usize, m: usize },
    WrongLength { agent: usize, expected: usize, found: usize },
    OutOfRange { agent: usize, alternative: usize, m: usize },
    Duplicate { agent: usize, alternative: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAgents => write!(f, "profile has no agents"),
            Violation::NoAlternatives => write!(f, "profile has no alternatives"),
            Violation::AgentCount { declared, found } => {
                write!(f, "declared n = {declared} but found {found} ballots")
            }
            Violation::PrefixLength { t, m } => {
                write!(f, "prefix length t = {t} outside 1..={m}")
            }
            Violation::WrongLength { agent, expected, found } => {
                write!(f, "ballot of agent {agent} has length {found}, expected {expected}")
            }
            Violation::OutOfRange { agent, alternative, m } => {
                write!(f, "index out of range: alternative {alternative} for agent {agent} (m = {m})")
            }
            Violation::Duplicate { agent, alternative } => {
                write!(f, "duplicate alternative {alternative} for agent {agent}")
            }
        }
    }
}

fn validate_ballots(m: usize, len: usize, ballots: &[Vec<usize>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if ballots.is_empty() {
        out.push(Violation::NoAgents);
    }
    if m == 0 {
        out.push(Violation::NoAlternatives);
    }
    for (agent, ballot) in ballots.iter().enumerate() {
        if ballot.len() != len {
            out.push(Violation::WrongLength { agent, expected: len, found: ballot.len() });
        }
        let mut seen = vec![false; m];
        for &alternative in ballot {
            if alternative >= m {
                out.push(Violation::OutOfRange { agent, alternative, m });
            } else if seen[alternative] {
                out.push(Violation::Duplicate { agent, alternative });
            } else {
                seen[alternative] = true;
            }
        }
    }
    out
}

/// Every violation in a set of full rankings over `m` alternatives.
pub fn validate_rankings(m: usize, rankings: &[Vec<usize>]) -> Vec<Violation> {
    validate_ballots(m, m, rankings)
}

/// Every violation in a set of top-`t` prefixes over `m` alternatives.
pub fn validate_prefixes(m: usize, t: usize, prefixes: &[Vec<usize>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if t == 0 || t > m {
        out.push(Violation::PrefixLength { t, m });
    }
    out.extend(validate_ballots(m, t, prefixes));
    out
}

/// A strict ranking, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Ranking {
    /// Builds a ranking from a permutation of `0..order.len()`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let v = validate_rankings(order.len(), std::slice::from_ref(&order));
        if !v.is_empty() {
            return Err(Error::InvalidProfile(v));
        }
        Ok(Self::from_valid(order))
    }

    fn from_valid(order: Vec<usize>) -> Self {
        let mut position = vec![0; order.len()];
        for (k, &x) in order.iter().enumerate() {
            position[x] = k;
        }
        Self { order, position }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn top(&self) -> usize {
        self.order[0]
    }

    pub fn last(&self) -> usize {
        self.order[self.order.len() - 1]
    }

    /// 1-based rank `r_i(x)`.
    pub fn rank(&self, x: usize) -> usize {
        self.position[x] + 1
    }

    /// Whether `x` is strictly preferred to `y`.
    pub fn prefers(&self, x: usize, y: usize) -> bool {
        self.position[x] < self.position[y]
    }
}

/// A full preference profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    m: usize,
    rankings: Vec<Ranking>,
}

impl Profile {
    pub fn from_rankings(m: usize, rankings: Vec<Vec<usize>>) -> Result<Self> {
        let v = validate_rankings(m, &rankings);
        if !v.is_empty() {
            return Err(Error::InvalidProfile(v));
        }
        Ok(Self { m, rankings: rankings.into_iter().map(Ranking::from_valid).collect() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub fn ranking(&self, agent: usize) -> &Ranking {
        &self.rankings[agent]
    }

    /// Raw orders, one per agent.
    pub fn orders(&self) -> Vec<Vec<usize>> {
        self.rankings.iter().map(|r| r.order.clone()).collect()
    }

    /// Always empty: a constructed profile is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate_rankings(self.m, &self.orders())
    }

    pub fn plurality_scores(&self) -> Vec<usize> {
        let mut s = vec![0; self.m];
        for r in &self.rankings {
            s[r.top()] += 1;
        }
        s
    }

    /// Number of agents ranking each alternative last.
    pub fn last_place_counts(&self) -> Vec<usize> {
        let mut s = vec![0; self.m];
        for r in &self.rankings {
            s[r.last()] += 1;
        }
        s
    }

    /// Restricts every ranking to `keep`, re-indexing the kept alternatives
    /// in ascending original order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Restriction> {
        let mut to_original: Vec<usize> = keep.to_vec();
        to_original.sort_unstable();
        to_original.dedup();
        if to_original.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        if let Some(&bad) = to_original.iter().find(|&&x| x >= self.m) {
            return Err(Error::InvalidParameter(format!("alternative {bad} outside 0..{}", self.m)));
        }
        let mut from_original = vec![None; self.m];
        for (j, &x) in to_original.iter().enumerate() {
            from_original[x] = Some(j);
        }
        let rankings =
            self.rankings.iter().map(|r| r.order.iter().filter_map(|&x| from_original[x]).collect()).collect();
        let profile = Profile::from_rankings(to_original.len(), rankings)?;
        Ok(Restriction { profile, to_original })
    }

    /// Keeps the first `t` entries of every ranking.
    pub fn truncate(&self, t: usize) -> Result<TopTProfile> {
        if t == 0 || t > self.m {
            return Err(Error::InvalidParameter(format!("t = {t} outside 1..={}", self.m)));
        }
        TopTProfile::from_prefixes(self.m, t, self.rankings.iter().map(|r| r.order[..t].to_vec()).collect())
    }
}

/// A restricted profile together with the map back to original indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub profile: Profile,
    /// `to_original[j]` is the original index of restricted alternative `j`.
    pub to_original: Vec<usize>,
}

/// Top-`t` ballots: each agent's `t` most preferred alternatives in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TopTProfile {
    m: usize,
    t: usize,
    prefixes: Vec<Vec<usize>>,
}

impl TopTProfile {
    pub fn from_prefixes(m: usize, t: usize, prefixes: Vec<Vec<usize>>) -> Result<Self> {
        let v = validate_prefixes(m, t, &prefixes);
        if !v.is_empty() {
            return Err(Error::InvalidProfile(v));
        }
        Ok(Self { m, t, prefixes })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.prefixes.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn prefixes(&self) -> &[Vec<usize>] {
        &self.prefixes
    }

    pub fn prefix(&self, agent: usize) -> &[usize] {
        &self.prefixes[agent]
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_prefixes(self.m, self.t, &self.prefixes)
    }

    /// 1-based rank of `x` for `agent`, if ranked.
    pub fn rank(&self, agent: usize, x: usize) -> Option<usize> {
        self.prefixes[agent].iter().position(|&y| y == x).map(|k| k + 1)
    }

    pub fn plurality_scores(&self) -> Vec<usize> {
        let mut s = vec![0; self.m];
        for p in &self.prefixes {
            s[p[0]] += 1;
        }
        s
    }

    /// Alternatives absent from `agent`'s prefix, ascending.
    pub fn unranked(&self, agent: usize) -> Vec<usize> {
        let mut ranked = vec![false; self.m];
        for &x in &self.prefixes[agent] {
            ranked[x] = true;
        }
        (0..self.m).filter(|&x| !ranked[x]).collect()
    }

    /// Number of full profiles extending this one: `((m - t)!)^n`.
    pub fn completion_count(&self) -> u128 {
        let per_agent: u128 = (1..=(self.m - self.t) as u128).product();
        per_agent.saturating_pow(self.n() as u32)
    }

    /// The completion that appends each agent's unranked alternatives in
    /// ascending index order.
    pub fn lexicographic_completion(&self) -> Profile {
        let rankings = (0..self.n())
            .map(|i| {
                let mut r = self.prefixes[i].clone();
                r.extend(self.unranked(i));
                r
            })
            .collect();
        Profile::from_rankings(self.m, rankings).expect("completion of a valid prefix")
    }
}

/// Either kind of ordinal input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ballots {
    Full(Profile),
    TopT(TopTProfile),
}

impl From<Profile> for Ballots {
    fn from(p: Profile) -> Self {
        Ballots::Full(p)
    }
}

impl From<TopTProfile> for Ballots {
    fn from(p: TopTProfile) -> Self {
        Ballots::TopT(p)
    }
}

impl Ballots {
    pub fn m(&self) -> usize {
        match self {
            Ballots::Full(p) => p.m(),
            Ballots::TopT(p) => p.m(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Ballots::Full(p) => p.n(),
            Ballots::TopT(p) => p.n(),
        }
    }

    /// Prefix length; `m` for full rankings.
    pub fn t(&self) -> usize {
        match self {
            Ballots::Full(p) => p.m(),
            Ballots::TopT(p) => p.t(),
        }
    }

    pub fn top(&self, agent: usize) -> usize {
        match self {
            Ballots::Full(p) => p.ranking(agent).top(),
            Ballots::TopT(p) => p.prefix(agent)[0],
        }
    }

    pub fn plurality_scores(&self) -> Vec<usize> {
        match self {
            Ballots::Full(p) => p.plurality_scores(),
            Ballots::TopT(p) => p.plurality_scores(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Ballots::Full(p) => p.validate(),
            Ballots::TopT(p) => p.validate(),
        }
    }

    pub fn as_full(&self) -> Option<&Profile> {
        match self {
            Ballots::Full(p) => Some(p),
            Ballots::TopT(_) => None,
        }
    }

    /// Views the ballots as top-t prefixes (`t = m` for full rankings).
    pub fn to_top_t(&self) -> TopTProfile {
        match self {
            Ballots::Full(p) => p.truncate(p.m()).expect("t = m is in range"),
            Ballots::TopT(p) => p.clone(),
        }
    }

    /// Pairs `(better, worse)` for `agent` whose order the ballot pins down:
    /// consecutive ranked pairs, then the last ranked alternative against
    /// every unranked one.
    pub fn ordered_pairs(&self, agent: usize) -> Vec<(usize, usize)> {
        match self {
            Ballots::Full(p) => p.ranking(agent).order().windows(2).map(|w| (w[0], w[1])).collect(),
            Ballots::TopT(p) => {
                let prefix = p.prefix(agent);
                let mut pairs: Vec<_> = prefix.windows(2).map(|w| (w[0], w[1])).collect();
                let last = prefix[prefix.len() - 1];
                pairs.extend(p.unranked(agent).into_iter().map(|u| (last, u)));
                pairs
            }
        }
    }
}
