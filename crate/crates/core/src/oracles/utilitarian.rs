use super::{over_completions, reduce, DistortionReport, OracleConfig, Witness};
use crate::cardinal::UtilityProfile;
use crate::lottery::{DistortionValue, Lottery};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::profile::{Ballots, Profile};
use crate::{exec, Error, Result};

// Expected welfare at or below this counts as zero in the brute force.
const ZERO: f64 = 1e-12;

/// Worst-case utilitarian distortion of `lot` over every unit-sum utility
/// profile consistent with `ballots`.
pub fn utilitarian_distortion(lot: &Lottery, ballots: &Ballots, config: &OracleConfig) -> Result<DistortionReport> {
    over_completions(lot, ballots, config, |b| direct(lot, b))
}

fn direct(lot: &Lottery, ballots: &Ballots) -> Result<DistortionReport> {
    let m = ballots.m();
    let base = base_program(lot, ballots);
    let reports = exec::map_range(m, |opt| candidate(&base, ballots.n(), m, opt));
    reduce(reports.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Homogenized program: `v(i, X) = s * u_i(X)` at variable `i * m + X`,
/// scale `s` last. Rows: `sum_X v(i, X) = s`, monotonicity along each
/// ballot, and `E_lot[sw(v)] = 1`.
fn base_program(lot: &Lottery, ballots: &Ballots) -> LinearProgram {
    let (n, m) = (ballots.n(), ballots.m());
    let scale = n * m;
    let var = |i: usize, x: usize| i * m + x;
    let mut lp = LinearProgram::maximize(vec![0.0; n * m + 1]);
    for i in 0..n {
        let mut terms: Vec<(usize, f64)> = (0..m).map(|x| (var(i, x), 1.0)).collect();
        terms.push((scale, -1.0));
        lp.constrain_sparse(&terms, Relation::Eq, 0.0);
        for (x, y) in ballots.ordered_pairs(i) {
            lp.constrain_sparse(&[(var(i, y), 1.0), (var(i, x), -1.0)], Relation::Le, 0.0);
        }
    }
    let expected: Vec<(usize, f64)> = (0..n).flat_map(|i| (0..m).map(move |x| (var(i, x), lot.get(x)))).collect();
    lp.constrain_sparse(&expected, Relation::Eq, 1.0);
    lp
}

fn to_utilities(n: usize, m: usize, v: &[f64]) -> Result<UtilityProfile> {
    let rows = (0..n)
        .map(|i| {
            let row: Vec<f64> = v[i * m..(i + 1) * m].iter().map(|x| x.max(0.0)).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    UtilityProfile::new(rows)
}

fn candidate(base: &LinearProgram, n: usize, m: usize, opt: usize) -> Result<DistortionReport> {
    let mut lp = base.clone();
    for i in 0..n {
        lp.objective[i * m + opt] = 1.0;
    }
    match lp::solve(&lp)? {
        LpOutcome::Optimal { value, assignment } => Ok(DistortionReport {
            value: DistortionValue::Finite(value.max(1.0)),
            arg_optimum: opt,
            witness: Some(Witness::Utility(to_utilities(n, m, &assignment)?)),
        }),
        // Along the ray the expected welfare stays zero while sw(opt) grows;
        // its scale component is positive, so it normalizes to utilities.
        LpOutcome::Unbounded { ray } => Ok(DistortionReport {
            value: DistortionValue::Unbounded,
            arg_optimum: opt,
            witness: to_utilities(n, m, &ray).ok().map(Witness::Utility),
        }),
        LpOutcome::Infeasible => Err(Error::Internal(format!("utilitarian LP infeasible for candidate {opt}"))),
    }
}

/// Independent twin of [`utilitarian_distortion`] for full rankings.
///
/// Each agent's consistent utilities form a polytope whose vertices put
/// `1/k` on the top `k` alternatives. The distortion is a maximum of
/// linear-fractional functions, so its supremum over the product of these
/// polytopes is attained at a product of vertices; all `m^n` are checked.
pub fn utilitarian_distortion_bruteforce(lot: &Lottery, profile: &Profile, budget: u128) -> Result<DistortionReport> {
    let (n, m) = (profile.n(), profile.m());
    if lot.m() != m {
        return Err(Error::DimensionMismatch(format!("lottery over {} alternatives, profile over {m}", lot.m())));
    }
    let needed = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    // Split on the first agent's vertex; each block walks the rest.
    let rest = needed / m as u128;
    let blocks = exec::map_range(m, |first| {
        let mut best: Option<(DistortionValue, Vec<usize>, usize)> = None;
        let mut ks = vec![1usize; n];
        ks[0] = first + 1;
        for _ in 0..rest {
            let mut sw = vec![0.0; m];
            for (i, &k) in ks.iter().enumerate() {
                for &x in &profile.ranking(i).order()[..k] {
                    sw[x] += 1.0 / k as f64;
                }
            }
            let (arg, top) =
                sw.iter()
                    .copied()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (x, s)| if s > acc.1 { (x, s) } else { acc });
            let expected = lot.expectation(&sw);
            let value =
                if expected <= ZERO { DistortionValue::Unbounded } else { DistortionValue::Finite(top / expected) };
            if best.as_ref().is_none_or(|(b, _, _)| value.exceeds(*b, 0.0)) {
                best = Some((value, ks.clone(), arg));
            }
            // next vertex combination, agents 1.. as a mixed-radix counter
            for k in ks.iter_mut().skip(1) {
                if *k < m {
                    *k += 1;
                    break;
                }
                *k = 1;
            }
        }
        best.expect("at least one vertex")
    });
    let (value, ks, arg) = blocks.into_iter().reduce(|a, b| if b.0.exceeds(a.0, 0.0) { b } else { a }).expect("m >= 1");
    let util = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut row = vec![0.0; m];
            for &x in &profile.ranking(i).order()[..k] {
                row[x] = 1.0 / k as f64;
            }
            row
        })
        .collect();
    Ok(DistortionReport { value, arg_optimum: arg, witness: Some(Witness::Utility(UtilityProfile::new(util)?)) })
}
