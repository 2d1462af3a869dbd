use super::{over_completions, reduce, DistortionReport, OracleConfig, Witness};
use crate::cardinal::MetricSpace;
use crate::lottery::{DistortionValue, Lottery};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::profile::Ballots;
use crate::{exec, Error, Result};

// A degenerate optimum (sc(X*) = 0) is reported when the bounded LP can
// still push the expected cost above this.
const DEGENERACY: f64 = 1e-7;

/// Worst-case metric distortion of `lot` over every pseudometric consistent
/// with `ballots`.
pub fn metric_distortion(lot: &Lottery, ballots: &Ballots, config: &OracleConfig) -> Result<DistortionReport> {
    over_completions(lot, ballots, config, |b| direct(lot, b))
}

/// Consistency and quadrilateral rows over the `n * m` distances
/// `d(i, X)` (variable `i * m + X`), plus the expected-cost objective.
fn base_program(lot: &Lottery, ballots: &Ballots) -> LinearProgram {
    let (n, m) = (ballots.n(), ballots.m());
    let var = |i: usize, x: usize| i * m + x;
    let mut objective = vec![0.0; n * m];
    for i in 0..n {
        for x in 0..m {
            objective[var(i, x)] = lot.get(x);
        }
    }
    let mut lp = LinearProgram::maximize(objective);
    for i in 0..n {
        for (x, y) in ballots.ordered_pairs(i) {
            lp.constrain_sparse(&[(var(i, x), 1.0), (var(i, y), -1.0)], Relation::Le, 0.0);
        }
    }
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            for x in 0..m {
                for y in (0..m).filter(|&y| y != x) {
                    lp.constrain_sparse(
                        &[(var(i, x), 1.0), (var(i, y), -1.0), (var(j, y), -1.0), (var(j, x), -1.0)],
                        Relation::Le,
                        0.0,
                    );
                }
            }
        }
    }
    lp
}

fn social_cost_row(n: usize, m: usize, x: usize) -> Vec<f64> {
    let mut row = vec![0.0; n * m];
    for i in 0..n {
        row[i * m + x] = 1.0;
    }
    row
}

fn direct(lot: &Lottery, ballots: &Ballots) -> Result<DistortionReport> {
    let (n, m) = (ballots.n(), ballots.m());
    let base = base_program(lot, ballots);
    let reports = exec::map_range(m, |opt| candidate(&base, n, m, opt));
    reduce(reports.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Subproblems for one candidate optimum `opt`.
fn candidate(base: &LinearProgram, n: usize, m: usize, opt: usize) -> Result<DistortionReport> {
    // sc(opt) = 0 with every distance at most 1
    let mut degenerate = base.clone();
    degenerate.add_eq(social_cost_row(n, m, opt), 0.0);
    for v in 0..n * m {
        degenerate.constrain_sparse(&[(v, 1.0)], Relation::Le, 1.0);
    }
    match lp::solve(&degenerate)? {
        LpOutcome::Optimal { value, assignment } if value > DEGENERACY => {
            return Ok(DistortionReport {
                value: DistortionValue::Unbounded,
                arg_optimum: opt,
                witness: Some(Witness::Metric(MetricSpace::from_bipartite(n, m, &assignment))),
            });
        }
        LpOutcome::Optimal { .. } => {}
        other => {
            return Err(Error::Internal(format!("degeneracy LP for candidate {opt}: {other:?}")));
        }
    }

    let mut main = base.clone();
    main.add_eq(social_cost_row(n, m, opt), 1.0);
    match lp::solve(&main)? {
        LpOutcome::Optimal { value, assignment } => Ok(DistortionReport {
            value: DistortionValue::Finite(value.max(1.0)),
            arg_optimum: opt,
            witness: Some(Witness::Metric(MetricSpace::from_bipartite(n, m, &assignment))),
        }),
        LpOutcome::Unbounded { .. } => {
            Ok(DistortionReport { value: DistortionValue::Unbounded, arg_optimum: opt, witness: None })
        }
        LpOutcome::Infeasible => Err(Error::Internal(format!("metric LP infeasible for candidate {opt}"))),
    }
}
