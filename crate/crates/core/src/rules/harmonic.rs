use serde::Serialize;

use crate::harmonic_number;
use crate::lottery::Lottery;
use crate::profile::Profile;
use crate::rules::veto::plurality_veto_trace;
use crate::{Error, Result};

/// Each agent picks `Y` with probability `1/(H_m r_i(Y))`; averaged over agents.
pub fn harmonic_rule(p: &Profile) -> Lottery {
    let (n, m) = (p.n(), p.m());
    let h = harmonic_number(m);
    let mut prob = vec![0.0; m];
    for r in p.rankings() {
        for (pos, &y) in r.order().iter().enumerate() {
            prob[y] += 1.0 / (h * (pos + 1) as f64);
        }
    }
    Lottery::normalized(prob.into_iter().map(|x| x / n as f64).collect()).expect("harmonic rows sum to one")
}

/// Weights anchored at an alternative: each agent spreads `1/(H_m r)` over the
/// alternatives they rank above the anchor and puts the rest on the anchor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedWeightFunction {
    pub anchor: usize,
    pub weights: Vec<Vec<f64>>,
}

impl TruncatedWeightFunction {
    pub fn get(&self, agent: usize, y: usize) -> f64 {
        self.weights[agent][y]
    }

    /// Total weight on `y` over all agents.
    pub fn plus(&self, y: usize) -> f64 {
        self.weights.iter().map(|row| row[y]).sum()
    }
}

pub fn truncated_weights(p: &Profile, anchor: usize) -> Result<TruncatedWeightFunction> {
    if anchor >= p.m() {
        return Err(Error::InvalidParameter(format!("anchor {anchor} out of range for m = {}", p.m())));
    }
    let h = harmonic_number(p.m());
    let weights = p
        .rankings()
        .iter()
        .map(|r| {
            let mut row = vec![0.0; p.m()];
            let mut above = 0.0;
            for (pos, &y) in r.order().iter().take_while(|&&y| y != anchor).enumerate() {
                row[y] = 1.0 / (h * (pos + 1) as f64);
                above += row[y];
            }
            row[anchor] = 1.0 - above;
            row
        })
        .collect();
    Ok(TruncatedWeightFunction { anchor, weights })
}

pub(crate) fn check_open_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 6.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 6), got {epsilon}")));
    }
    Ok(())
}

/// Truncated Harmonic anchored at the Plurality Veto winner.
pub fn truncated_harmonic(p: &Profile, epsilon: f64) -> Result<Lottery> {
    check_open_epsilon(epsilon)?;
    let anchor = plurality_veto_trace(p).winner;
    truncated_harmonic_at(p, epsilon, anchor)
}

/// Truncated Harmonic around a given anchor.
pub fn truncated_harmonic_at(p: &Profile, epsilon: f64, anchor: usize) -> Result<Lottery> {
    check_open_epsilon(epsilon)?;
    let w = truncated_weights(p, anchor)?;
    let n = p.n() as f64;
    let prob = (0..p.m()).map(|y| if y == anchor { 0.0 } else { epsilon / 6.0 * w.plus(y) / n }).collect::<Vec<_>>();
    let off: f64 = prob.iter().sum();
    let mut prob = prob;
    prob[anchor] = 1.0 - off;
    Lottery::normalized(prob)
}
