use super::{permutations, rule_distortion, OracleConfig, World};
use crate::lottery::DistortionValue;
use crate::profile::{Ballots, Profile, TopTProfile};
use crate::rules::Rule;
use crate::{exec, tol, Error, Result};

/// Number of distinct ballots profiles with `n` agents and `m` alternatives
/// (top-`t` prefixes when `t` is given).
pub fn profile_count(n: usize, m: usize, t: Option<usize>) -> u128 {
    let len = t.unwrap_or(m);
    let per_agent: u128 = ((m - len + 1)..=m).map(|k| k as u128).product();
    per_agent.checked_pow(n as u32).unwrap_or(u128::MAX)
}

fn arrangements(m: usize, len: usize) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..m).collect();
    let mut out: Vec<Vec<usize>> = permutations(&all).into_iter().map(|p| p[..len].to_vec()).collect();
    out.dedup();
    out
}

/// Every profile in the enumeration order used by [`exhaustive_worst_case`]:
/// agent 0 varies fastest.
pub fn all_profiles(n: usize, m: usize, t: Option<usize>, budget: u128) -> Result<Vec<Ballots>> {
    let needed = profile_count(n, m, t);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let len = t.unwrap_or(m);
    if len == 0 || len > m || n == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and 1 <= t <= m, got n = {n}, t = {len}, m = {m}")));
    }
    let ballots = arrangements(m, len);
    Ok((0..needed as usize)
        .map(|mut idx| {
            let rows: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let k = idx % ballots.len();
                    idx /= ballots.len();
                    ballots[k].clone()
                })
                .collect();
            match t {
                Some(t) if t < m => TopTProfile::from_prefixes(m, t, rows).expect("valid prefixes").into(),
                _ => Profile::from_rankings(m, rows).expect("valid rankings").into(),
            }
        })
        .collect())
}

/// Worst per-profile distortion of `rule` over every profile of the given
/// shape, with the first profile attaining it.
pub fn exhaustive_worst_case(
    rule: &Rule,
    n: usize,
    m: usize,
    world: World,
    t: Option<usize>,
    config: &OracleConfig,
) -> Result<(DistortionValue, Ballots)> {
    let profiles = all_profiles(n, m, t, config.budget)?;
    let values = exec::map(&profiles, |b| rule_distortion(rule, b, world, config).map(|r| r.value));
    let mut best: Option<(DistortionValue, usize)> = None;
    for (k, v) in values.into_iter().enumerate() {
        let v = v?;
        if best.is_none_or(|(b, _)| v.exceeds(b, tol::STRUCTURAL)) {
            best = Some((v, k));
        }
    }
    let (value, k) = best.expect("at least one profile");
    Ok((value, profiles.into_iter().nth(k).expect("index in range")))
}
