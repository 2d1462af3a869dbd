//! Cardinal instances: pseudometrics over agents and alternatives, and
//! unit-sum utility profiles.

use crate::profile::Ballots;
use crate::{tol, Error, Result};

/// A pseudometric over `n` agents followed by `m` alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    n: usize,
    m: usize,
    dist: Vec<f64>,
}

impl MetricSpace {
    /// Validates a full `(n + m) x (n + m)` distance grid.
    pub fn new(n: usize, m: usize, dist: Vec<Vec<f64>>) -> Result<Self> {
        let k = n + m;
        if dist.len() != k || dist.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch(format!("distance grid must be {k}x{k} for n = {n}, m = {m}")));
        }
        let space = Self { n, m, dist: dist.into_iter().flatten().collect() };
        space.check_axioms()?;
        Ok(space)
    }

    /// Points on a line; distances are absolute differences.
    pub fn from_line(agents: &[f64], alternatives: &[f64]) -> Self {
        let pts: Vec<f64> = agents.iter().chain(alternatives).copied().collect();
        let k = pts.len();
        let mut dist = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                dist[a * k + b] = (pts[a] - pts[b]).abs();
            }
        }
        Self { n: agents.len(), m: alternatives.len(), dist }
    }

    /// Extends an agent-to-alternative grid to a pseudometric by taking
    /// shortest paths in the complete bipartite graph. Agent-alternative
    /// entries are unchanged whenever the grid satisfies
    /// `d(i,X) <= d(i,Y) + d(j,Y) + d(j,X)`.
    pub fn from_bipartite(n: usize, m: usize, agent_alt: &[f64]) -> Self {
        let k = n + m;
        let mut dist = vec![f64::INFINITY; k * k];
        for a in 0..k {
            dist[a * k + a] = 0.0;
        }
        for i in 0..n {
            for x in 0..m {
                let w = agent_alt[i * m + x].max(0.0);
                dist[i * k + n + x] = w;
                dist[(n + x) * k + i] = w;
            }
        }
        for via in 0..k {
            for a in 0..k {
                let da = dist[a * k + via];
                if !da.is_finite() {
                    continue;
                }
                for b in 0..k {
                    let cand = da + dist[via * k + b];
                    if cand < dist[a * k + b] {
                        dist[a * k + b] = cand;
                    }
                }
            }
        }
        Self { n, m, dist }
    }

    fn check_axioms(&self) -> Result<()> {
        let k = self.n + self.m;
        for a in 0..k {
            if self.point(a, a).abs() > tol::STRUCTURAL {
                return Err(Error::InvalidCardinal(format!("nonzero diagonal at point {a}")));
            }
            for b in 0..k {
                let d = self.point(a, b);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidCardinal(format!("bad distance d({a},{b}) = {d}")));
                }
                if (d - self.point(b, a)).abs() > tol::STRUCTURAL {
                    return Err(Error::InvalidCardinal(format!("asymmetric at ({a},{b})")));
                }
            }
        }
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if self.point(a, b) > self.point(a, c) + self.point(c, b) + tol::STRUCTURAL {
                        return Err(Error::InvalidCardinal(format!("triangle inequality fails for ({a},{b}) via {c}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Distance between raw points (agents first, then alternatives).
    pub fn point(&self, a: usize, b: usize) -> f64 {
        self.dist[a * (self.n + self.m) + b]
    }

    /// `d(i, X)`.
    pub fn agent_alt(&self, agent: usize, alt: usize) -> f64 {
        self.point(agent, self.n + alt)
    }

    /// `d(X, Y)`.
    pub fn alt_alt(&self, x: usize, y: usize) -> f64 {
        self.point(self.n + x, self.n + y)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n + self.m).map(<[f64]>::to_vec).collect()
    }

    /// Multiplies every distance by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, m: self.m, dist: self.dist.iter().map(|d| d * c).collect() }
    }

    /// `sc(X) = sum_i d(i, X)`.
    pub fn social_cost(&self, alt: usize) -> f64 {
        (0..self.n).map(|i| self.agent_alt(i, alt)).sum()
    }

    pub fn social_costs(&self) -> Vec<f64> {
        (0..self.m).map(|x| self.social_cost(x)).collect()
    }
}

/// Unit-sum utilities, one row per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityProfile {
    n: usize,
    m: usize,
    util: Vec<f64>,
}

impl UtilityProfile {
    pub fn new(util: Vec<Vec<f64>>) -> Result<Self> {
        let n = util.len();
        let m = util.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || util.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("utility rows must be nonempty and equal length".into()));
        }
        for (i, row) in util.iter().enumerate() {
            if row.iter().any(|&u| !u.is_finite() || u < -tol::STRUCTURAL) {
                return Err(Error::InvalidCardinal(format!("negative utility for agent {i}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol::STRUCTURAL {
                return Err(Error::InvalidCardinal(format!("utilities of agent {i} sum to {s}")));
            }
        }
        Ok(Self { n, m, util: util.into_iter().flatten().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, agent: usize, alt: usize) -> f64 {
        self.util[agent * self.m + alt]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.util.chunks(self.m).map(<[f64]>::to_vec).collect()
    }

    /// `sw(X) = sum_i u_i(X)`.
    pub fn social_welfare(&self, alt: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, alt)).sum()
    }

    pub fn social_welfares(&self) -> Vec<f64> {
        (0..self.m).map(|x| self.social_welfare(x)).collect()
    }
}

fn check_dims(what: &str, n: usize, m: usize, b: &Ballots) -> Result<()> {
    if n != b.n() || m != b.m() {
        return Err(Error::DimensionMismatch(format!(
            "{what} has n = {n}, m = {m} but ballots have n = {}, m = {}",
            b.n(),
            b.m()
        )));
    }
    Ok(())
}

/// `d` is consistent with the ballots: every pinned-down pair `X >_i Y` has
/// `d(i,X) <= d(i,Y)` (within the structural tolerance).
pub fn is_metric_consistent(d: &MetricSpace, ballots: &Ballots) -> Result<bool> {
    check_dims("metric", d.n(), d.m(), ballots)?;
    Ok((0..ballots.n()).all(|i| {
        ballots.ordered_pairs(i).into_iter().all(|(x, y)| d.agent_alt(i, x) <= d.agent_alt(i, y) + tol::STRUCTURAL)
    }))
}

/// `u` is consistent with the ballots. For top-t ballots this means the
/// ranked prefix is non-increasing and no unranked utility exceeds any
/// ranked one.
pub fn is_utility_consistent(u: &UtilityProfile, ballots: &Ballots) -> Result<bool> {
    check_dims("utility profile", u.n(), u.m(), ballots)?;
    Ok((0..ballots.n())
        .all(|i| ballots.ordered_pairs(i).into_iter().all(|(x, y)| u.get(i, x) + tol::STRUCTURAL >= u.get(i, y))))
}
