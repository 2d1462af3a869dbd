use serde::Serialize;

use crate::lottery::Lottery;
use crate::profile::{Profile, TopTProfile};
use crate::{Error, Result};

/// One decrement in a Plurality Veto run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VetoEvent {
    pub agent: usize,
    pub vetoed: usize,
    pub score_after: usize,
}

/// Audit record of a Plurality Veto run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VetoTrace {
    pub initial_scores: Vec<usize>,
    pub events: Vec<VetoEvent>,
    pub winner: usize,
}

/// Scores start at plurality; agents veto in index order, each decrementing
/// the alternative `least_preferred(agent, alive)` picks among survivors.
/// The alternative eliminated by the last veto wins.
fn run_vetoes(scores: Vec<usize>, least_preferred: impl Fn(usize, &[bool]) -> usize) -> VetoTrace {
    let n: usize = scores.iter().sum();
    let mut alive: Vec<bool> = scores.iter().map(|&s| s > 0).collect();
    let mut current = scores.clone();
    let mut events = Vec::with_capacity(n);
    let mut winner = 0;
    for agent in 0..n {
        let vetoed = least_preferred(agent, &alive);
        current[vetoed] -= 1;
        if current[vetoed] == 0 {
            alive[vetoed] = false;
            winner = vetoed;
        }
        events.push(VetoEvent { agent, vetoed, score_after: current[vetoed] });
    }
    VetoTrace { initial_scores: scores, events, winner }
}

pub fn plurality_veto_trace(p: &Profile) -> VetoTrace {
    run_vetoes(p.plurality_scores(), |i, alive| {
        *p.ranking(i).order().iter().rev().find(|&&x| alive[x]).expect("a survivor remains")
    })
}

pub fn plurality_veto(p: &Profile) -> (Lottery, VetoTrace) {
    let trace = plurality_veto_trace(p);
    (Lottery::point_mass(p.m(), trace.winner), trace)
}

/// Plurality Veto on top-t ballots. An agent vetoes the highest-index
/// survivor missing from their prefix, or their lowest-ranked survivor if
/// every survivor is ranked.
pub fn plurality_veto_top_t_trace(p: &TopTProfile) -> VetoTrace {
    run_vetoes(p.plurality_scores(), |i, alive| {
        let prefix = p.prefix(i);
        (0..p.m())
            .rev()
            .find(|&x| alive[x] && !prefix.contains(&x))
            .or_else(|| prefix.iter().rev().copied().find(|&x| alive[x]))
            .expect("a survivor remains")
    })
}

/// Alternatives with plurality score at least `eps * n / ((6 + eps) * m)`.
pub fn pruned_set(p: &Profile, epsilon: f64) -> Vec<usize> {
    let (n, m) = (p.n() as f64, p.m() as f64);
    let lhs_scale = (6.0 + epsilon) * m;
    let rhs = epsilon * n;
    p.plurality_scores()
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s as f64 * lhs_scale >= rhs * (1.0 - 1e-12))
        .map(|(x, _)| x)
        .collect()
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Plurality Veto on the profile restricted to alternatives of plurality
/// score at least `eps * n / ((6 + eps) * m)`.
pub fn pruned_plurality_veto(p: &Profile, epsilon: f64) -> Result<Lottery> {
    check_epsilon(epsilon)?;
    let keep = pruned_set(p, epsilon);
    let restricted = p.restrict(&keep)?;
    let trace = plurality_veto_trace(&restricted.profile);
    Ok(Lottery::point_mass(p.m(), restricted.to_original[trace.winner]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(r: Vec<Vec<usize>>) -> Profile {
        Profile::from_rankings(r[0].len(), r).unwrap()
    }

    #[test]
    fn p2_trace() {
        let p2 = full(vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 1, 0]]);
        let t = plurality_veto_trace(&p2);
        assert_eq!(t.winner, 1);
        let vetoed: Vec<usize> = t.events.iter().map(|e| e.vetoed).collect();
        assert_eq!(vetoed, vec![2, 0, 1]);
        assert!(t.events.iter().all(|e| e.score_after == 0));
    }

    #[test]
    fn unanimous_and_hand_traced_profiles() {
        assert_eq!(plurality_veto_trace(&full(vec![vec![0, 1, 2]; 3])).winner, 0);
        let p = full(vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 0]]);
        let t = plurality_veto_trace(&p);
        assert_eq!(t.winner, 0);
        assert_eq!(t.events.len(), 3);
        assert_eq!(t.initial_scores, vec![2, 1, 0]);
    }

    #[test]
    fn ppv_examples() {
        let p1 = full(vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]]);
        assert_eq!(pruned_set(&p1, 1.0), vec![0, 1]);
        assert_eq!(pruned_plurality_veto(&p1, 1.0).unwrap().as_point_mass(), Some(0));
        let p2 = full(vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 1, 0]]);
        assert_eq!(pruned_set(&p2, 1.0), vec![0, 1, 2]);
        assert_eq!(pruned_plurality_veto(&p2, 1.0).unwrap().as_point_mass(), Some(1));
        let unanimous = full(vec![vec![2, 0, 1]; 5]);
        for eps in [0.1, 1.0, 50.0] {
            assert_eq!(pruned_plurality_veto(&unanimous, eps).unwrap().as_point_mass(), Some(2));
        }
        assert!(pruned_plurality_veto(&p1, 0.0).is_err());
        assert!(pruned_plurality_veto(&p1, f64::NAN).is_err());
    }

    #[test]
    fn top_t_completion_convention() {
        // agent 0 ranks [0, 1]; survivors {0, 2, 3}: 3 is the highest unranked
        let p = TopTProfile::from_prefixes(4, 2, vec![vec![0, 1], vec![2, 0], vec![3, 2]]).unwrap();
        let t = plurality_veto_top_t_trace(&p);
        assert_eq!(t.events[0].vetoed, 3);
        // agent 1 ranks [2, 0]; survivors {0, 2}, both ranked: veto 0
        assert_eq!(t.events[1].vetoed, 0);
        assert_eq!(t.winner, 2);
    }
}
