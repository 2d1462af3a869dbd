use std::fmt;

use crate::harmonic_number;
use crate::lottery::Lottery;
use crate::profile::TopTProfile;
use crate::rules::plurality::argmax_lowest;
use crate::rules::veto::plurality_veto_top_t_trace;
use crate::{Error, Result};

/// A deterministic rule on top-t ballots, used as the base rule of
/// [`TopTDeterministic`] and as the anchor of the top-t Truncated Harmonic.
pub trait TopTSelector: fmt::Debug + Send + Sync {
    fn select(&self, p: &TopTProfile) -> Result<usize>;
}

/// Plurality Veto with unranked survivors vetoed highest index first.
#[derive(Debug, Clone, Copy, Default)]
pub struct RestrictedPluralityVeto;

impl TopTSelector for RestrictedPluralityVeto {
    fn select(&self, p: &TopTProfile) -> Result<usize> {
        Ok(plurality_veto_top_t_trace(p).winner)
    }
}

/// Always returns the same alternative.
#[derive(Debug, Clone, Copy)]
pub struct FixedAnchor(pub usize);

impl TopTSelector for FixedAnchor {
    fn select(&self, p: &TopTProfile) -> Result<usize> {
        if self.0 >= p.m() {
            return Err(Error::InvalidParameter(format!("anchor {} out of range for m = {}", self.0, p.m())));
        }
        Ok(self.0)
    }
}

/// Deterministic top-t rule: plurality for short prefixes, otherwise the base
/// rule on the alternatives with plurality score at least `n/(2m)`.
#[derive(Debug)]
pub struct TopTDeterministic<B: TopTSelector = RestrictedPluralityVeto> {
    pub base: B,
}

impl Default for TopTDeterministic {
    fn default() -> Self {
        TopTDeterministic { base: RestrictedPluralityVeto }
    }
}

impl<B: TopTSelector> TopTSelector for TopTDeterministic<B> {
    fn select(&self, p: &TopTProfile) -> Result<usize> {
        let (n, m, t) = (p.n(), p.m(), p.t());
        let scores = p.plurality_scores();
        if 2 * t <= m {
            return Ok(argmax_lowest(&scores));
        }
        let strong: Vec<usize> = (0..m).filter(|&x| 2 * m * scores[x] >= n).collect();
        if strong.len() < 2 * (m - t + 1) {
            return Ok(argmax_lowest(&scores));
        }
        let k = strong.len() + t - m;
        let (restricted, to_original) = restrict_top_t(p, &strong, k)?;
        Ok(to_original[self.base.select(&restricted)?])
    }
}

/// Keeps the alternatives in `keep`, re-indexed in order, and cuts each
/// prefix to its first `k` kept entries.
fn restrict_top_t(p: &TopTProfile, keep: &[usize], k: usize) -> Result<(TopTProfile, Vec<usize>)> {
    let mut index = vec![usize::MAX; p.m()];
    for (new, &old) in keep.iter().enumerate() {
        index[old] = new;
    }
    let prefixes = p
        .prefixes()
        .iter()
        .map(|prefix| prefix.iter().filter(|&&x| index[x] != usize::MAX).map(|&x| index[x]).take(k).collect())
        .collect();
    Ok((TopTProfile::from_prefixes(keep.len(), k, prefixes)?, keep.to_vec()))
}

pub fn top_t_det_rule(p: &TopTProfile) -> Result<Lottery> {
    let winner = TopTDeterministic::default().select(p)?;
    Ok(Lottery::point_mass(p.m(), winner))
}

pub fn top_t_truncated_harmonic(p: &TopTProfile) -> Result<Lottery> {
    top_t_truncated_harmonic_with(p, &TopTDeterministic::default())
}

/// Each agent puts `1/(2 H_t r)` on ranked alternatives above the anchor and
/// the rest on the anchor. An unranked anchor sits below the whole prefix.
pub fn top_t_truncated_harmonic_with(p: &TopTProfile, anchor: &dyn TopTSelector) -> Result<Lottery> {
    let anchor = anchor.select(p)?;
    let h = harmonic_number(p.t());
    let n = p.n() as f64;
    let mut prob = vec![0.0; p.m()];
    for prefix in p.prefixes() {
        let mut above = 0.0;
        for (pos, &y) in prefix.iter().take_while(|&&y| y != anchor).enumerate() {
            let w = 1.0 / (2.0 * h * (pos + 1) as f64);
            prob[y] += w / n;
            above += w;
        }
        prob[anchor] += (1.0 - above) / n;
    }
    Lottery::normalized(prob)
}
