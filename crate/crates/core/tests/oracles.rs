mod support;

use distortion_lab::instances::{random_lottery, random_profile_with, rng};
use distortion_lab::lottery::{DistortionValue, Lottery};
use distortion_lab::lp::{solve, LinearProgram, LpOutcome};
use distortion_lab::oracles::{
    distortion, exhaustive_worst_case, metric_distortion, rule_distortion, utilitarian_distortion, OracleConfig,
    TopTMode, World,
};
use distortion_lab::profile::{Ballots, Profile, TopTProfile};
use distortion_lab::rules::Rule;
use distortion_lab::Error;
use rand::Rng;
use support::invariants::{consistent_utilities, euclidean_instance};

/// Metric distortion from the textbook formulation: every pairwise distance
/// among the `n + m` points is a variable, with all triangle inequalities.
fn full_triangle_metric(lot: &Lottery, p: &Profile) -> DistortionValue {
    let (n, m) = (p.n(), p.m());
    let k = n + m;
    let vars = k * (k - 1) / 2;
    // pairs a < b numbered row by row
    let var = |a: usize, b: usize| {
        let (a, b) = (a.min(b), a.max(b));
        a * k - a * (a + 1) / 2 + (b - a - 1)
    };
    let build = |target: usize, normalization: f64| {
        let mut objective = vec![0.0; vars];
        for i in 0..n {
            for x in 0..m {
                objective[var(i, n + x)] += lot.get(x);
            }
        }
        let mut lp = LinearProgram::maximize(objective);
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if a < b && c != a && c != b {
                        lp.constrain_sparse(
                            &[(var(a, b), 1.0), (var(a, c), -1.0), (var(c, b), -1.0)],
                            distortion_lab::lp::Relation::Le,
                            0.0,
                        );
                    }
                }
            }
        }
        for i in 0..n {
            let order = p.ranking(i).order();
            for w in order.windows(2) {
                lp.constrain_sparse(
                    &[(var(i, n + w[0]), 1.0), (var(i, n + w[1]), -1.0)],
                    distortion_lab::lp::Relation::Le,
                    0.0,
                );
            }
        }
        let sc: Vec<(usize, f64)> = (0..n).map(|i| (var(i, n + target), 1.0)).collect();
        lp.constrain_sparse(&sc, distortion_lab::lp::Relation::Eq, normalization);
        if normalization == 0.0 {
            for v in 0..vars {
                lp.constrain_sparse(&[(v, 1.0)], distortion_lab::lp::Relation::Le, 1.0);
            }
        }
        lp
    };
    let mut best = 0.0f64;
    for target in 0..m {
        let degenerate = solve(&build(target, 0.0)).unwrap();
        if degenerate.value().unwrap_or(0.0) > 1e-7 {
            return DistortionValue::Unbounded;
        }
        match solve(&build(target, 1.0)).unwrap() {
            LpOutcome::Optimal { value, .. } => best = best.max(value),
            LpOutcome::Unbounded { .. } => return DistortionValue::Unbounded,
            LpOutcome::Infeasible => {}
        }
    }
    DistortionValue::Finite(best)
}

#[test]
fn metric_oracle_matches_full_triangle_formulation() {
    let mut r = rng(31);
    let mut unbounded = 0;
    for _ in 0..60 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(2..=3));
        let p = random_profile_with(n, m, &mut r).unwrap();
        let lot = if r.gen_bool(0.5) {
            Rule::RandomDictatorship.apply(&p.clone().into()).unwrap()
        } else {
            random_lottery(m, &mut r)
        };
        let ours = metric_distortion(&lot, &p.clone().into(), &OracleConfig::default()).unwrap().value;
        let reference = full_triangle_metric(&lot, &p);
        unbounded += usize::from(reference.is_unbounded());
        assert!(ours.agrees(reference, 1e-6), "{:?}: {ours} vs {reference}", p.orders());
    }
    assert!(unbounded > 0 && unbounded < 60);
}

#[test]
fn sampled_instances_never_beat_the_oracle() {
    let mut r = rng(5);
    for _ in 0..200 {
        let (n, m) = (r.gen_range(1..=4), r.gen_range(2..=4));
        let (d, p) = euclidean_instance(&mut r, n, m);
        let u = consistent_utilities(&mut r, &p);
        let lot = random_lottery(m, &mut r);
        let ballots: Ballots = p.into();
        let cfg = OracleConfig::default();
        let metric = metric_distortion(&lot, &ballots, &cfg).unwrap().value;
        let utilitarian = utilitarian_distortion(&lot, &ballots, &cfg).unwrap().value;
        let sampled_metric = distortion_lab::lottery::eval_distortion(&lot, &d);
        let sampled_util = distortion_lab::lottery::eval_distortion(&lot, &u);
        assert!(!sampled_metric.exceeds(metric, 1e-6), "{sampled_metric} > {metric}");
        assert!(!sampled_util.exceeds(utilitarian, 1e-6), "{sampled_util} > {utilitarian}");
    }
}

#[test]
fn spec_examples() {
    let cfg = OracleConfig::default();
    let ab: Ballots = Profile::from_rankings(2, vec![vec![0, 1], vec![1, 0]]).unwrap().into();
    let rep = metric_distortion(&Lottery::point_mass(2, 0), &ab, &cfg).unwrap();
    assert!(rep.value.agrees(DistortionValue::Finite(3.0), 1e-9));
    let single: Ballots = Profile::from_rankings(2, vec![vec![0, 1]]).unwrap().into();
    let rep = utilitarian_distortion(&Lottery::uniform(2), &single, &cfg).unwrap();
    assert!(rep.value.agrees(DistortionValue::Finite(2.0), 1e-9));
    let last_c: Ballots = Profile::from_rankings(3, vec![vec![0, 1, 2], vec![1, 0, 2]]).unwrap().into();
    assert!(rule_distortion(&Rule::Harmonic, &last_c, World::Metric, &cfg).unwrap().value.is_unbounded());
    let (v, _) = exhaustive_worst_case(&Rule::RandomDictatorship, 2, 2, World::Metric, None, &cfg).unwrap();
    assert!(v.agrees(DistortionValue::Finite(2.0), 1e-6), "{v}");
    let (v, _) = exhaustive_worst_case(&Rule::Plurality, 3, 3, World::Metric, None, &cfg).unwrap();
    assert!(!v.exceeds(DistortionValue::Finite(5.0), 1e-6), "{v}");
}

#[test]
fn direct_top_t_encoding_is_exact() {
    let mut r = rng(77);
    for _ in 0..60 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(2..=4));
        let t = r.gen_range(1..=m);
        let p = random_profile_with(n, m, &mut r).unwrap().truncate(t).unwrap();
        let lot = random_lottery(m, &mut r);
        let ballots: Ballots = p.clone().into();
        for world in [World::Metric, World::Utilitarian] {
            let cfg = |mode| OracleConfig { top_t_mode: mode, ..OracleConfig::default() };
            let direct = distortion(&lot, &ballots, world, &cfg(TopTMode::Direct)).unwrap();
            let enumerated = distortion(&lot, &ballots, world, &cfg(TopTMode::Completions)).unwrap();
            assert!(
                direct.value.agrees(enumerated.value, 1e-6 * enumerated.value.as_f64().max(1.0)),
                "{world} {:?}: direct {} vs completions {}",
                p.prefixes(),
                direct.value,
                enumerated.value
            );
            if let Some(w) = direct.witness {
                assert!(w.is_consistent(&ballots).unwrap());
            }
        }
    }
}

#[test]
fn completion_budget_is_enforced() {
    let p = TopTProfile::from_prefixes(5, 1, vec![vec![0], vec![1], vec![2]]).unwrap();
    let cfg = OracleConfig { completion_budget: 100, top_t_mode: TopTMode::Completions, ..OracleConfig::default() };
    let err = distortion(&Lottery::uniform(5), &p.clone().into(), World::Metric, &cfg).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { needed: 13824, budget: 100 }));
    let auto = OracleConfig { completion_budget: 100, ..OracleConfig::default() };
    assert!(distortion(&Lottery::uniform(5), &p.into(), World::Metric, &auto).is_ok());
}
