mod common;

use std::collections::BTreeSet;

use common::{fixture, model_matchings, model_open_matchings, oracle_matchings, oracle_open_matchings};
use stable_admissions::algorithms::{da, gs_scorelimits, lower_quota_heuristic, Side};
use stable_admissions::formulations::{
    build_common, build_lower, build_paired, build_paired_via_common, build_scorelimits,
    extract_solution, LimitMode, Solution,
};
use stable_admissions::matching::ScoreLimits;
use stable_admissions::model::Role;
use stable_admissions::oracle::{check, enumerate_stable, Variant};
use stable_admissions::preprocess::{apply_fixings, fix_iterate, must_close, must_open, CollegeSet};
use stable_admissions::solver::{solve, Limits, Status};

fn set(items: &[usize]) -> CollegeSet {
    items.iter().copied().collect()
}

#[test]
fn i1_single_applicant() {
    let inst = fixture("i1_single.json");
    assert_eq!(oracle_matchings(&inst, Variant::Classical).len(), 1);
    assert_eq!(da(&inst, Side::Applicant).unwrap().assignments(), &[Some(0)]);
    assert_eq!(gs_scorelimits(&inst, Side::Applicant).unwrap().1, ScoreLimits(vec![0]));
}

#[test]
fn i2_strict_limits_range() {
    let inst = fixture("i2_two_applicants.json");
    let model = build_scorelimits(&inst, LimitMode::Strict).unwrap();
    let t = common::projections(&model, |r| matches!(r, Role::Limit(_)));
    let expected: BTreeSet<Vec<i64>> = (4..=7).map(|v| vec![v]).collect();
    assert_eq!(t, expected);
    assert_eq!(gs_scorelimits(&inst, Side::Applicant).unwrap().1, ScoreLimits(vec![4]));
}

#[test]
fn i3_ties_min_and_full() {
    let inst = fixture("i3_tied_pair.json");
    let model = build_scorelimits(&inst, LimitMode::TiesMin).unwrap();
    let r = solve(&model, &Limits::none()).unwrap();
    assert_eq!(r.status, Status::Optimal);
    assert_eq!(r.objective_values, vec![6]);
    let sol = extract_solution(&inst, &model, &r.assignment.unwrap()).unwrap();
    assert_eq!(sol.matching.size(), 0);
    let full = build_scorelimits(&inst, LimitMode::TiesFull).unwrap();
    let t = common::projections(&full, |r| matches!(r, Role::Limit(_)));
    assert_eq!(t, common::oracle_limits(&inst));
    assert_eq!(t, BTreeSet::from([vec![6]]));
}

#[test]
fn i4_closes_the_college() {
    let inst = fixture("i4_lower_single.json");
    let h = lower_quota_heuristic(&inst).unwrap();
    assert_eq!(h.closed, vec![true]);
    assert_eq!(h.matching.size(), 0);
    assert_eq!(must_close(&inst, &set(&[])).unwrap(), set(&[0]));
    let model = build_lower(&inst, false).unwrap();
    assert_eq!(model_open_matchings(&inst, &model), oracle_open_matchings(&inst));
}

#[test]
fn i4b_opens_the_college() {
    let inst = fixture("i4b_lower_pair.json");
    assert_eq!(must_open(&inst, &set(&[])).unwrap(), set(&[0]));
    let r = fix_iterate(&inst).unwrap();
    assert_eq!(r.must_open, set(&[0]));
}

#[test]
fn i5_lower_quotas_without_stable_solution() {
    let inst = fixture("i5_lower_infeasible.json");
    assert!(enumerate_stable(&inst, Variant::Lower, 10).unwrap().solutions.is_empty());
    let model = build_lower(&inst, false).unwrap();
    assert_eq!(solve(&model, &Limits::none()).unwrap().status, Status::Infeasible);
}

#[test]
fn i6_crossing_common_quotas_without_stable_solution() {
    let inst = fixture("i6_common_infeasible.json");
    assert!(!inst.is_nested());
    assert!(enumerate_stable(&inst, Variant::Common, 10).unwrap().solutions.is_empty());
    let model = build_common(&inst).unwrap();
    assert_eq!(solve(&model, &Limits::none()).unwrap().status, Status::Infeasible);
}

#[test]
fn i7_pairs_without_stable_solution() {
    let inst = fixture("i7_paired_infeasible.json");
    assert!(enumerate_stable(&inst, Variant::Paired, 10).unwrap().solutions.is_empty());
    for model in [build_paired(&inst).unwrap(), build_paired_via_common(&inst).unwrap()] {
        assert_eq!(solve(&model, &Limits::none()).unwrap().status, Status::Infeasible, "{}", model.name);
    }
}

#[test]
fn i8_heuristic_fails_where_the_model_succeeds() {
    let inst = fixture("i8_heuristic_fails.json");
    let h = lower_quota_heuristic(&inst).unwrap();
    let mut hsol = Solution::from_matching(h.matching);
    hsol.open = Some(h.closed.iter().map(|c| !c).collect());
    assert!(!check(&inst, &hsol, Variant::Lower).unwrap().is_stable());

    let model = build_lower(&inst, false).unwrap();
    let r = solve(&model, &Limits::none()).unwrap();
    let sol = extract_solution(&inst, &model, &r.assignment.unwrap()).unwrap();
    assert!(check(&inst, &sol, Variant::Lower).unwrap().is_stable());
    assert_eq!(model_open_matchings(&inst, &model), oracle_open_matchings(&inst));

    // c3 cannot reach its lower quota even alone, and closing it lets c2 reach its own.
    let fixing = fix_iterate(&inst).unwrap();
    assert_eq!(must_close(&inst, &set(&[0])).unwrap(), set(&[2]));
    assert_eq!(fixing.must_open, set(&[0, 1]));
    assert_eq!(fixing.must_close, set(&[2]));
    for s in enumerate_stable(&inst, Variant::Lower, 100).unwrap().solutions {
        let open = s.open.unwrap();
        assert!(fixing.must_open.iter().all(|&j| open[j]));
        assert!(fixing.must_close.iter().all(|&j| !open[j]));
    }
}

#[test]
fn two_round_fixing() {
    let inst = fixture("two_round_fixing.json");
    let r = fix_iterate(&inst).unwrap();
    assert!(r.trace.len() >= 2);
    assert!(r.trace[1].open.is_superset(&r.trace[0].open));
    assert!(r.trace[1].open.len() > r.trace[0].open.len());
    assert_eq!(r.trace[0].open, set(&[0]));
    assert_eq!(r.trace[0].closed, set(&[1]));
    assert_eq!(r.must_open, set(&[0, 2]));
    let stable = enumerate_stable(&inst, Variant::Lower, 100).unwrap().solutions;
    assert!(!stable.is_empty());
    for s in &stable {
        let open = s.open.as_ref().unwrap();
        assert!(r.must_open.iter().all(|&j| open[j]));
        assert!(r.must_close.iter().all(|&j| !open[j]));
    }
    let mut model = build_lower(&inst, false).unwrap();
    let before = model_matchings(&inst, &model);
    apply_fixings(&mut model, &r);
    assert_eq!(model_matchings(&inst, &model), before);
}
