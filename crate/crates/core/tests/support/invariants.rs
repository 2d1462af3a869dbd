//! Seeded invariant checks shared by the property tests and the acceptance
//! suite. Each check draws one random case from its seed and reports the
//! first violation it finds.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use distortion_lab::cardinal::{is_metric_consistent, is_utility_consistent, MetricSpace, UtilityProfile};
use distortion_lab::instances::{
    prop31_profile, random_lottery, random_profile, random_profile_with, rng, thm36_instance, thm51_profile,
    thm53_instance,
};
use distortion_lab::lottery::{eval_distortion, DistortionValue, Lottery};
use distortion_lab::lp::{solve, LinearProgram, LpOutcome};
use distortion_lab::oracles::{
    distortion, metric_distortion, utilitarian_distortion, utilitarian_distortion_bruteforce, OracleConfig, World,
};
use distortion_lab::profile::{Ballots, Profile};
use distortion_lab::rules::{
    mix, plurality_veto_trace, pruned_plurality_veto, pruned_set, truncated_harmonic, truncated_weights, Rule,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Check = fn(u64) -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Agents and alternatives as uniform points in a cube of dimension 1 to 3,
/// with the profile they induce.
pub fn euclidean_instance(r: &mut ChaCha8Rng, n: usize, m: usize) -> (MetricSpace, Profile) {
    let dim = r.gen_range(1..=3);
    let pts: Vec<Vec<f64>> = (0..n + m).map(|_| (0..dim).map(|_| r.gen::<f64>()).collect()).collect();
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| pts.iter().map(|b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()).collect())
        .collect();
    let d = MetricSpace::new(n, m, dist).expect("euclidean distances form a metric");
    let rankings = (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&x, &y| d.agent_alt(i, x).total_cmp(&d.agent_alt(i, y)).then(x.cmp(&y)));
            order
        })
        .collect();
    (d, Profile::from_rankings(m, rankings).expect("sorted indices form rankings"))
}

/// Unit-sum utilities that are non-increasing along each ranking.
pub fn consistent_utilities(r: &mut ChaCha8Rng, p: &Profile) -> UtilityProfile {
    let rows = p
        .rankings()
        .iter()
        .map(|rk| {
            let mut w: Vec<f64> = (0..p.m()).map(|_| r.gen::<f64>()).collect();
            w.sort_by(|a, b| b.total_cmp(a));
            let total: f64 = w.iter().sum();
            let mut row = vec![0.0; p.m()];
            for (pos, &x) in rk.order().iter().enumerate() {
                row[x] = w[pos] / total;
            }
            row
        })
        .collect();
    UtilityProfile::new(rows).expect("normalized rows")
}

fn dims(r: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> (usize, usize) {
    (r.gen_range(1..=max_n), r.gen_range(2..=max_m))
}

fn full_rules() -> Vec<Rule> {
    vec![
        Rule::Plurality,
        Rule::Copeland,
        Rule::PluralityVeto,
        Rule::PrunedPluralityVeto { epsilon: 1.0 },
        Rule::RandomDictatorship,
        Rule::Harmonic,
        Rule::TruncatedHarmonic { epsilon: 1.0 },
        Rule::TopTDet,
        Rule::TopTTruncatedHarmonic,
        Rule::Mix { first: Box::new(Rule::RandomDictatorship), second: Box::new(Rule::Harmonic), beta: 0.5 },
    ]
}

// ---- core ----

pub fn scaling_invariance(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 5, 5);
    let (d, _) = euclidean_instance(&mut r, n, m);
    let lot = random_lottery(m, &mut r);
    let c = 10f64.powf(r.gen_range(-3.0..3.0));
    let (a, b) = (eval_distortion(&lot, &d), eval_distortion(&lot, &d.scaled(c)));
    ensure!(a.agrees(b, 1e-9 * a.as_f64().max(1.0)), "scaling by {c}: {a} vs {b}");
    let zero = MetricSpace::from_line(&vec![0.0; n], &vec![0.0; m]);
    ensure!(eval_distortion(&lot, &zero.scaled(c)) == DistortionValue::Finite(1.0), "all-zero metric");
    let mut pts = vec![0.0; m];
    pts[0] = 1.0;
    let degenerate = MetricSpace::from_line(&vec![0.0; n], &pts);
    let lot = Lottery::point_mass(m, 0);
    ensure!(eval_distortion(&lot, &degenerate.scaled(c)).is_unbounded(), "unbounded must stay unbounded");
    Ok(())
}

pub fn preferred_alternatives_are_close(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 5, 5);
    let (d, p) = euclidean_instance(&mut r, n, m);
    for i in 0..n {
        let order = p.ranking(i).order();
        for (a, &y) in order.iter().enumerate() {
            for &x in &order[a + 1..] {
                ensure!(
                    d.agent_alt(i, x) >= d.alt_alt(x, y) / 2.0 - 1e-9,
                    "agent {i}: d(i,{x}) = {} < d({x},{y})/2 = {}",
                    d.agent_alt(i, x),
                    d.alt_alt(x, y) / 2.0
                );
            }
        }
    }
    Ok(())
}

pub fn restriction_composes(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 5, 6);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let mut keep: Vec<usize> = (0..m).filter(|_| r.gen_bool(0.6)).collect();
    if keep.is_empty() {
        keep.push(r.gen_range(0..m));
    }
    let once = p.restrict(&keep).map_err(err)?;
    let all: Vec<usize> = (0..keep.len()).collect();
    let twice = once.profile.restrict(&all).map_err(err)?;
    ensure!(twice.profile == once.profile, "restricting to everything changed the profile");
    ensure!(twice.to_original == all, "index map is not the identity");
    for (i, rk) in once.profile.rankings().iter().enumerate() {
        let expected: Vec<usize> = p.ranking(i).order().iter().copied().filter(|x| keep.contains(x)).collect();
        let mapped: Vec<usize> = rk.order().iter().map(|&x| once.to_original[x]).collect();
        ensure!(mapped == expected, "agent {i}: relative order not preserved");
    }
    Ok(())
}

pub fn utility_consistency_survives_truncation(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 5, 5);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let u = consistent_utilities(&mut r, &p);
    ensure!(is_utility_consistent(&u, &Ballots::Full(p.clone())).map_err(err)?, "sampled utilities inconsistent");
    for t in 1..=m {
        let top = Ballots::TopT(p.truncate(t).map_err(err)?);
        ensure!(is_utility_consistent(&u, &top).map_err(err)?, "inconsistent after truncation to t = {t}");
    }
    Ok(())
}

// ---- lp ----

fn random_packing_lp(r: &mut ChaCha8Rng) -> (LinearProgram, Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let (vars, rows) = (r.gen_range(1..=6), r.gen_range(1..=6));
    let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..vars).map(|_| r.gen_range(0.1..3.0)).collect()).collect();
    let b: Vec<f64> = (0..rows).map(|_| r.gen_range(0.5..5.0)).collect();
    let c: Vec<f64> = (0..vars).map(|_| r.gen_range(-1.0..3.0)).collect();
    let mut lp = LinearProgram::maximize(c.clone());
    for (row, &rhs) in a.iter().zip(&b) {
        lp.add_le(row.clone(), rhs);
    }
    (lp, a, b, c)
}

pub fn lp_value_matches_assignment(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (lp, ..) = random_packing_lp(&mut r);
    match solve(&lp).map_err(err)? {
        LpOutcome::Optimal { value, assignment } => {
            ensure!((lp.objective_value(&assignment) - value).abs() <= 1e-9, "objective mismatch");
            ensure!(lp.max_violation(&assignment) <= 1e-7, "infeasible assignment");
            Ok(())
        }
        other => Err(format!("bounded feasible LP reported {other:?}")),
    }
}

pub fn lp_strong_duality(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (lp, a, b, c) = random_packing_lp(&mut r);
    let primal = solve(&lp).map_err(err)?.value().ok_or("primal not optimal")?;
    let mut dual = LinearProgram::minimize(b.clone());
    for (j, &cj) in c.iter().enumerate() {
        dual.add_ge(a.iter().map(|row| row[j]).collect(), cj);
    }
    let dual_value = solve(&dual).map_err(err)?.value().ok_or("dual not optimal")?;
    ensure!((primal - dual_value).abs() <= 1e-6, "primal {primal} vs dual {dual_value}");
    Ok(())
}

pub fn lp_is_deterministic(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (lp, ..) = random_packing_lp(&mut r);
    let (x, y) = (solve(&lp).map_err(err)?, solve(&lp).map_err(err)?);
    ensure!(format!("{x:?}") == format!("{y:?}"), "two solves differ");
    Ok(())
}

// ---- oracles ----

pub fn oracle_matches_bruteforce(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 4, 4);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let lot = if r.gen_bool(0.2) { Lottery::point_mass(m, r.gen_range(0..m)) } else { random_lottery(m, &mut r) };
    let lp = utilitarian_distortion(&lot, &p.clone().into(), &OracleConfig::default()).map_err(err)?;
    let brute = utilitarian_distortion_bruteforce(&lot, &p, u128::MAX).map_err(err)?;
    ensure!(lp.value.agrees(brute.value, 1e-6), "LP {} vs brute force {}", lp.value, brute.value);
    Ok(())
}

pub fn witnesses_are_sound(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 4, 4);
    let ballots: Ballots = random_profile_with(n, m, &mut r).map_err(err)?.into();
    let lot = random_lottery(m, &mut r);
    for world in [World::Metric, World::Utilitarian] {
        let report = distortion(&lot, &ballots, world, &OracleConfig::default()).map_err(err)?;
        let Some(value) = report.value.finite() else { continue };
        let w = report.witness.ok_or("finite report without witness")?;
        ensure!(w.is_consistent(&ballots).map_err(err)?, "{world} witness inconsistent");
        let replay = w.distortion(&lot).as_f64();
        ensure!((replay - value).abs() <= 1e-5 * value.max(1.0), "{world}: witness gives {replay}, report {value}");
    }
    Ok(())
}

pub fn less_information_never_helps(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 3, 4);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let t = r.gen_range(1..=m);
    let top: Ballots = p.truncate(t).map_err(err)?.into();
    let full: Ballots = p.into();
    let rule = [Rule::Plurality, Rule::RandomDictatorship, Rule::TopTTruncatedHarmonic][r.gen_range(0..3)].clone();
    let lot = rule.apply(&top).map_err(err)?;
    for world in [World::Metric, World::Utilitarian] {
        let cfg = OracleConfig::default();
        let coarse = distortion(&lot, &top, world, &cfg).map_err(err)?.value;
        let fine = distortion(&lot, &full, world, &cfg).map_err(err)?.value;
        ensure!(!fine.exceeds(coarse, 1e-6), "{rule} t = {t} {world}: full {fine} > top-t {coarse}");
    }
    Ok(())
}

pub fn popular_alternatives_are_nearly_optimal(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 8, 5);
    let (d, p) = euclidean_instance(&mut r, n, m);
    let tau = r.gen_range(0.0..1.0) / m as f64;
    let scores = p.plurality_scores();
    let costs = d.social_costs();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let best_popular =
        (0..m).filter(|&x| scores[x] as f64 >= tau * n as f64).map(|x| costs[x]).fold(f64::INFINITY, f64::min);
    let bound = (1.0 + 2.0 / (1.0 - tau * m as f64)) * best + 1e-6;
    ensure!(best_popular <= bound, "tau = {tau}: {best_popular} > {bound}");
    Ok(())
}

pub fn top_choice_support_is_finite(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 4, 4);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let tops = p.plurality_scores();
    let weights: Vec<f64> = tops.iter().map(|&s| if s > 0 { r.gen_range(0.1..1.0) } else { 0.0 }).collect();
    let lot = Lottery::normalized(weights).map_err(err)?;
    let cfg = OracleConfig::default();
    let v = metric_distortion(&lot, &p.clone().into(), &cfg).map_err(err)?.value;
    ensure!(v.finite().is_some(), "top-supported lottery unbounded");

    let loser = r.gen_range(0..m);
    let rankings = p
        .orders()
        .into_iter()
        .map(|mut o| {
            o.retain(|&x| x != loser);
            o.push(loser);
            o
        })
        .collect();
    let q = Profile::from_rankings(m, rankings).map_err(err)?;
    let mut weights: Vec<f64> = (0..m).map(|_| r.gen::<f64>()).collect();
    weights[loser] += 0.01;
    let lot = Lottery::normalized(weights).map_err(err)?;
    let v = metric_distortion(&lot, &q.into(), &cfg).map_err(err)?.value;
    ensure!(v.is_unbounded(), "mass on a unanimous loser gave {v}");
    Ok(())
}

// ---- rules ----

pub fn rule_outputs_are_lotteries(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 7, 6);
    let ballots: Ballots = random_profile_with(n, m, &mut r).map_err(err)?.into();
    for rule in full_rules() {
        let lot = rule.apply(&ballots).map_err(err)?;
        ensure!(lot.m() == m, "{rule}: wrong dimension");
        ensure!(lot.probs().iter().all(|&x| x >= 0.0), "{rule}: negative mass");
        ensure!((lot.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12, "{rule}: mass does not sum to one");
    }
    Ok(())
}

pub fn veto_winner_is_first_as_often_as_last(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 9, 6);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let trace = plurality_veto_trace(&p);
    let w = trace.winner;
    ensure!(trace.events.len() == n, "expected {n} vetoes");
    ensure!(p.plurality_scores()[w] >= p.last_place_counts()[w], "winner {w} is last more often than first");
    Ok(())
}

pub fn pruned_winner_is_popular(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 9, 6);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let eps = r.gen_range(0.05..10.0);
    let winner = pruned_plurality_veto(&p, eps).map_err(err)?.as_point_mass().ok_or("not a point mass")?;
    ensure!(pruned_set(&p, eps).contains(&winner), "winner {winner} outside the pruned set");
    Ok(())
}

pub fn truncated_harmonic_concentrates_on_anchor(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 7, 6);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let eps = r.gen_range(0.01..5.99);
    let lot = truncated_harmonic(&p, eps).map_err(err)?;
    let anchor = plurality_veto_trace(&p).winner;
    ensure!(lot.get(anchor) >= 1.0 - eps / 6.0 - 1e-12, "anchor mass {} below 1 - eps/6", lot.get(anchor));
    for y in (0..m).filter(|&y| y != anchor) {
        let above = p.rankings().iter().any(|rk| rk.prefers(y, anchor));
        ensure!(above || lot.get(y) == 0.0, "{y} is never above the anchor but has mass {}", lot.get(y));
    }
    let w = truncated_weights(&p, anchor).map_err(err)?;
    for y in (0..m).filter(|&y| y != anchor) {
        let expected = eps / 6.0 * w.plus(y) / n as f64;
        ensure!((lot.get(y) - expected).abs() <= 1e-12, "lot({y}) = {} but weights give {expected}", lot.get(y));
    }
    for (i, row) in w.weights.iter().enumerate() {
        ensure!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12, "weight row {i} does not sum to one");
        for (y, &v) in row.iter().enumerate() {
            ensure!((0.0..=1.0).contains(&v), "weight ({i},{y}) = {v}");
            ensure!(!p.ranking(i).prefers(anchor, y) || v == 0.0, "weight below the anchor for agent {i}");
        }
    }
    Ok(())
}

pub fn mixing_is_affine(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 5, 5);
    let (d, _) = euclidean_instance(&mut r, n, m);
    let (l1, l2) = (random_lottery(m, &mut r), random_lottery(m, &mut r));
    let beta = r.gen::<f64>();
    let costs = d.social_costs();
    let mixed = mix(&l1, &l2, beta).map_err(err)?.expectation(&costs);
    let expected = beta * l1.expectation(&costs) + (1.0 - beta) * l2.expectation(&costs);
    ensure!((mixed - expected).abs() <= 1e-9 * expected.max(1.0), "{mixed} vs {expected}");
    Ok(())
}

pub fn rules_are_anonymous(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = dims(&mut r, 7, 5);
    let p = random_profile_with(n, m, &mut r).map_err(err)?;
    let mut orders = p.orders();
    orders.shuffle(&mut r);
    let q = Profile::from_rankings(m, orders).map_err(err)?;
    let (bp, bq): (Ballots, Ballots) = (p.clone().into(), q.clone().into());
    for rule in [Rule::Plurality, Rule::Copeland, Rule::RandomDictatorship, Rule::Harmonic] {
        let (a, b) = (rule.apply(&bp).map_err(err)?, rule.apply(&bq).map_err(err)?);
        let same = a.probs().iter().zip(b.probs()).all(|(x, y)| (x - y).abs() <= 1e-12);
        ensure!(same, "{rule} changed under agent permutation");
    }
    let w = plurality_veto_trace(&q).winner;
    ensure!(q.plurality_scores()[w] >= q.last_place_counts()[w], "permuted veto winner {w} fails the first/last count");
    Ok(())
}

// ---- instances ----

pub fn generators_emit_valid_profiles(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = (r.gen_range(1..=8), r.gen_range(1..=6));
    ensure!(random_profile(n, m, seed).map_err(err)?.validate().is_empty(), "random profile invalid");
    let m31 = r.gen_range(3..=6);
    let p31 = prop31_profile((m31 - 1) * r.gen_range(1..=4), m31).map_err(err)?;
    ensure!(p31.validate().is_empty(), "prop31 invalid");
    let m51 = r.gen_range(2..=6);
    let t51 = r.gen_range(1..=m51);
    let p51 = thm51_profile((m51 - t51 + 1) * r.gen_range(1..=3), m51, t51).map_err(err)?;
    ensure!(p51.validate().is_empty(), "thm51 invalid");
    let (p36, _) = thm36_instance(4, 4 * r.gen_range(1..=3)).map_err(err)?;
    ensure!(p36.validate().is_empty(), "thm36 invalid");
    let (p53, _) = thm53_instance(12, 6, 2, 4.0 / 3f64.sqrt()).map_err(err)?;
    ensure!(p53.validate().is_empty(), "thm53 invalid");
    Ok(())
}

pub fn prop31_veto_winner_is_center(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let m = r.gen_range(3..=7);
    let n = (m - 1) * r.gen_range(1..=6);
    let p = prop31_profile(n, m).map_err(err)?;
    let w = plurality_veto_trace(&p).winner;
    ensure!(w == 0, "n = {n}, m = {m}: winner {w}");
    Ok(())
}

pub fn thm36_metric_is_consistent(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (m, n) = [(4, 4 * r.gen_range(1..=5)), (16, 40 * r.gen_range(1..=2))][r.gen_range(0..2)];
    let (p, d) = thm36_instance(m, n).map_err(err)?;
    ensure!(is_metric_consistent(&d, &Ballots::Full(p)).map_err(err)?, "m = {m}, n = {n}: inconsistent");
    Ok(())
}

pub fn generators_are_deterministic(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let (n, m) = (r.gen_range(1..=6), r.gen_range(1..=6));
    ensure!(random_profile(n, m, seed).map_err(err)? == random_profile(n, m, seed).map_err(err)?, "random");
    ensure!(prop31_profile(6, 3).map_err(err)? == prop31_profile(6, 3).map_err(err)?, "prop31");
    ensure!(thm36_instance(4, 8).map_err(err)? == thm36_instance(4, 8).map_err(err)?, "thm36");
    ensure!(thm51_profile(6, 4, 2).map_err(err)? == thm51_profile(6, 4, 2).map_err(err)?, "thm51");
    Ok(())
}

/// Every check, by module.
pub const ALL: &[(&str, Check)] = &[
    ("core: scaling leaves distortion unchanged", scaling_invariance),
    ("core: preferred alternatives are within twice the distance", preferred_alternatives_are_close),
    ("core: restriction composes to the identity", restriction_composes),
    ("core: utility consistency survives truncation", utility_consistency_survives_truncation),
    ("lp: optimal value matches assignment", lp_value_matches_assignment),
    ("lp: strong duality", lp_strong_duality),
    ("lp: deterministic", lp_is_deterministic),
    ("oracles: LP matches brute force", oracle_matches_bruteforce),
    ("oracles: witnesses are sound", witnesses_are_sound),
    ("oracles: less information never lowers distortion", less_information_never_helps),
    ("oracles: popular alternatives are nearly optimal", popular_alternatives_are_nearly_optimal),
    ("oracles: top-choice support finite, unanimous loser unbounded", top_choice_support_is_finite),
    ("rules: outputs are lotteries", rule_outputs_are_lotteries),
    ("rules: veto winner first as often as last", veto_winner_is_first_as_often_as_last),
    ("rules: pruned winner is popular", pruned_winner_is_popular),
    ("rules: truncated harmonic concentrates on the anchor", truncated_harmonic_concentrates_on_anchor),
    ("rules: mixing is affine", mixing_is_affine),
    ("rules: anonymity", rules_are_anonymous),
    ("instances: generators emit valid profiles", generators_emit_valid_profiles),
    ("instances: prop31 veto winner is the center", prop31_veto_winner_is_center),
    ("instances: thm36 metric is consistent", thm36_metric_is_consistent),
    ("instances: generators are deterministic", generators_are_deterministic),
];
