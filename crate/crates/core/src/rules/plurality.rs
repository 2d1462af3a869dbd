use crate::lottery::Lottery;
use crate::profile::{Ballots, Profile};

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax_lowest<T: PartialOrd + Copy>(scores: &[T]) -> usize {
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = k;
        }
    }
    best
}

/// Plurality winner, lowest index among ties.
pub fn plurality_winner(ballots: &Ballots) -> usize {
    argmax_lowest(&ballots.plurality_scores())
}

pub fn plurality(ballots: &Ballots) -> Lottery {
    Lottery::point_mass(ballots.m(), plurality_winner(ballots))
}

/// Copeland scores: one point per pairwise majority win, half per tie.
pub fn copeland_scores(p: &Profile) -> Vec<f64> {
    let m = p.m();
    let mut scores = vec![0.0; m];
    for x in 0..m {
        for y in (x + 1)..m {
            let x_over_y = p.rankings().iter().filter(|r| r.prefers(x, y)).count();
            let y_over_x = p.n() - x_over_y;
            match x_over_y.cmp(&y_over_x) {
                std::cmp::Ordering::Greater => scores[x] += 1.0,
                std::cmp::Ordering::Less => scores[y] += 1.0,
                std::cmp::Ordering::Equal => {
                    scores[x] += 0.5;
                    scores[y] += 0.5;
                }
            }
        }
    }
    scores
}

pub fn copeland(p: &Profile) -> Lottery {
    Lottery::point_mass(p.m(), argmax_lowest(&copeland_scores(p)))
}

/// Each agent's top choice with probability `1/n`.
pub fn random_dictatorship(ballots: &Ballots) -> Lottery {
    let n = ballots.n() as f64;
    let prob = ballots.plurality_scores().into_iter().map(|s| s as f64 / n).collect();
    Lottery::normalized(prob).expect("plurality scores sum to n")
}
