//! Instance generators: seeded random profiles and the lower-bound
//! constructions, plus JSON file formats in [`io`].

pub mod io;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cardinal::MetricSpace;
use crate::lottery::Lottery;
use crate::profile::{Profile, TopTProfile};
use crate::{Error, Result};

/// Names accepted by the `generate` command.
pub const GENERATORS: [&str; 5] = ["random", "prop31", "thm36", "thm51", "thm53"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` independent uniform rankings over `m` alternatives.
pub fn random_profile(n: usize, m: usize, seed: u64) -> Result<Profile> {
    random_profile_with(n, m, &mut rng(seed))
}

pub fn random_profile_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Profile> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!("need n, m >= 1, got n = {n}, m = {m}")));
    }
    let rankings = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(rng);
            order
        })
        .collect();
    Profile::from_rankings(m, rankings)
}

/// Random full profile truncated to its top `t`.
pub fn random_top_t_profile(n: usize, m: usize, t: usize, seed: u64) -> Result<TopTProfile> {
    random_profile(n, m, seed)?.truncate(t)
}

/// Lottery with i.i.d. exponential weights, i.e. uniform on the simplex.
pub fn random_lottery<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Lottery {
    let weights = (0..m).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-12).collect();
    Lottery::normalized(weights).expect("positive weights")
}

fn nearest_multiple(n: usize, d: usize) -> usize {
    let down = n / d * d;
    if down == 0 || n - down > down + d - n {
        down + d
    } else {
        down
    }
}

fn require_multiple(what: &str, n: usize, d: usize) -> Result<()> {
    if d == 0 || !n.is_multiple_of(d) || n == 0 {
        return Err(Error::Divisibility(format!(
            "{what} = {n} must be a positive multiple of {d}; nearest valid value is {}",
            nearest_multiple(n, d.max(1))
        )));
    }
    Ok(())
}

/// `order` followed by the remaining alternatives in index order, with
/// `last` (if any) moved to the end.
fn complete(m: usize, head: &[usize], last: Option<usize>) -> Vec<usize> {
    let mut out = head.to_vec();
    out.extend((0..m).filter(|x| !head.contains(x) && Some(*x) != last));
    out.extend(last);
    out
}

/// Plurality lower-bound family with `X* = 0`: for each `k` in `1..m`,
/// `n/(m-1) - 1` agents rank `k` first, `0` second and `k+1` (cyclically)
/// last, and one agent ranks `0` first and `k` last.
pub fn prop31_profile(n: usize, m: usize) -> Result<Profile> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("need m >= 3, got {m}")));
    }
    require_multiple("n", n, m - 1)?;
    let q = n / (m - 1);
    let mut rankings = Vec::with_capacity(n);
    for k in 1..m {
        let next = k % (m - 1) + 1;
        for _ in 1..q {
            rankings.push(complete(m, &[k, 0], Some(next)));
        }
        rankings.push(complete(m, &[0], Some(k)));
    }
    Profile::from_rankings(m, rankings)
}

fn exact_sqrt(m: usize) -> Option<usize> {
    let r = (m as f64).sqrt().round() as usize;
    (r * r == m).then_some(r)
}

/// Deterministic utilitarian lower bound. Alternative `0` is `X`; `A1`,
/// `A2`, `A3` are consecutive blocks of `(m-1)/3`. Agent groups `N1`, `N2`
/// (`n(1-1/sqrt m)/2` each) and `N3` (`n/sqrt m`) spread their tops evenly
/// over `A1`, `A2`, `A3`. Returned with the line metric putting `A1` at 0,
/// `N1` at 1 and everything else at 2.
pub fn thm36_instance(m: usize, n: usize) -> Result<(Profile, MetricSpace)> {
    let s = exact_sqrt(m).ok_or_else(|| Error::Divisibility(format!("m = {m} must be a perfect square")))?;
    if m < 4 {
        return Err(Error::InvalidParameter(format!("need m >= 4, got {m}")));
    }
    require_multiple("m - 1", m - 1, 3)?;
    let b = (m - 1) / 3;
    let valid = |n: usize| {
        let (outer2, inner) = (n * (s - 1), n / s);
        n > 0 && n.is_multiple_of(s) && outer2 % (2 * s) == 0 && (outer2 / (2 * s)) % b == 0 && inner % b == 0
    };
    if !valid(n) {
        let nearest = (1..=n + 4 * s * b)
            .flat_map(|d| [n.checked_sub(d), Some(n + d)])
            .flatten()
            .find(|&c| valid(c))
            .unwrap_or(0);
        return Err(Error::Divisibility(format!(
            "n = {n} gives non-integral group sizes for m = {m}; nearest valid value is {nearest}"
        )));
    }
    let outer = n * (s - 1) / (2 * s);
    let inner = n / s;
    let block = |k: usize| -> Vec<usize> { (1 + k * b..1 + (k + 1) * b).collect() };
    let (a1, a2, a3) = (block(0), block(1), block(2));
    let group = |size: usize, tops: &[usize], first: &[usize], second: &[usize]| -> Vec<Vec<usize>> {
        (0..size)
            .map(|j| {
                let top = tops[j * tops.len() / size];
                let mut r = vec![top, 0];
                for blk in [&a3[..], first, second] {
                    r.extend(blk.iter().filter(|&&y| y != top));
                }
                r
            })
            .collect()
    };
    let mut rankings = group(outer, &a1, &a1, &a2);
    rankings.extend(group(outer, &a2, &a2, &a1));
    rankings.extend(group(inner, &a3, &a2, &a1));
    let profile = Profile::from_rankings(m, rankings)?;
    let agents: Vec<f64> = (0..n).map(|i| if i < outer { 1.0 } else { 2.0 }).collect();
    let alts: Vec<f64> = (0..m).map(|x| if a1.contains(&x) { 0.0 } else { 2.0 }).collect();
    Ok((profile, MetricSpace::from_line(&agents, &alts)))
}

/// Top-t lower bound: alternatives `0..=m-t` are each the top choice of
/// `n/(m-t+1)` agents, and every agent continues with `m-t+1, ..., m-1`.
pub fn thm51_profile(n: usize, m: usize, t: usize) -> Result<TopTProfile> {
    if t == 0 || t > m {
        return Err(Error::InvalidParameter(format!("need 1 <= t <= m, got t = {t}, m = {m}")));
    }
    let tops = m - t + 1;
    require_multiple("n", n, tops)?;
    let q = n / tops;
    let prefixes = (0..n).map(|i| std::iter::once(i / q).chain(tops..m).collect()).collect();
    TopTProfile::from_prefixes(m, t, prefixes)
}

/// Top-t metric/utilitarian tradeoff instance. Alternatives: `A+` is
/// `0..m/3`, `A-` is `m/3..2m/3`, then blocks `A_k` of size `t`. Each group
/// `N_k` of `n t sqrt(t) / (dM m sqrt(m))` agents ranks `A_k`; the rest take
/// cyclic windows over `A+`. The metric targets `k* = 0`.
pub fn thm53_instance(n: usize, m: usize, t: usize, d_m: f64) -> Result<(TopTProfile, MetricSpace)> {
    if t == 0 || t > m {
        return Err(Error::InvalidParameter(format!("need 1 <= t <= m, got t = {t}, m = {m}")));
    }
    if !(d_m.is_finite() && d_m > 1.0) {
        return Err(Error::InvalidParameter(format!("need finite dM > 1, got {d_m}")));
    }
    require_multiple("m", m, 3 * t)?;
    let third = m / 3;
    let blocks = m / (3 * t);
    let exact = n as f64 * (t as f64).powf(1.5) / (d_m * (m as f64).powf(1.5));
    let g = exact.round();
    if g < 1.0 || (exact - g).abs() > 1e-9 * exact.max(1.0) {
        return Err(Error::Divisibility(format!(
            "group size n t sqrt(t) / (dM m sqrt(m)) = {exact} must be a positive integer"
        )));
    }
    let g = g as usize;
    let grouped = g * blocks;
    if grouped > n {
        return Err(Error::Divisibility(format!("groups need {grouped} agents but n = {n}")));
    }
    let rest = n - grouped;
    if !(rest * t).is_multiple_of(third) {
        return Err(Error::Divisibility(format!(
            "remaining agents ({rest}) times t must be a multiple of m/3 = {third}"
        )));
    }
    let block = |k: usize| -> Vec<usize> { (2 * third + k * t..2 * third + (k + 1) * t).collect() };
    let mut prefixes: Vec<Vec<usize>> = (0..blocks).flat_map(|k| std::iter::repeat_n(block(k), g)).collect();
    prefixes.extend((0..rest).map(|j| (0..t).map(|s| (j * t + s) % third).collect()));
    let profile = TopTProfile::from_prefixes(m, t, prefixes)?;
    let target = block(0);
    let agents: Vec<f64> = (0..n).map(|i| if i < g { 1.0 } else { 2.0 }).collect();
    let alts: Vec<f64> = (0..m).map(|x| if target.contains(&x) { 0.0 } else { 2.0 }).collect();
    Ok((profile, MetricSpace::from_line(&agents, &alts)))
}
