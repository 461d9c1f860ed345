#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stable_admissions::instance::{generate, parse_instance, GenConfig, Instance, Topology};
use stable_admissions::model::{LinearModel, Role};
use stable_admissions::oracle::{enumerate_stable, Variant};
use stable_admissions::solver::enumerate_feasible;

pub type Assignments = Vec<Option<usize>>;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> Instance {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_instance(&text).unwrap()
}

const CAP: usize = 200_000;

/// Distinct projections of the model's feasible set onto the variables with
/// the selected roles, as value vectors in variable order.
pub fn projections(model: &LinearModel, keep: impl Fn(Role) -> bool) -> BTreeSet<Vec<i64>> {
    let vars = model.vars_where(keep);
    let e = enumerate_feasible(model, &vars, CAP).unwrap();
    assert!(!e.truncated, "enumeration of {} truncated", model.name);
    e.items.into_iter().collect()
}

/// Matchings in the model's feasible set.
pub fn model_matchings(inst: &Instance, model: &LinearModel) -> BTreeSet<Assignments> {
    let vars = model.vars_where(|r| matches!(r, Role::Assign(_)));
    let apps: Vec<usize> = vars
        .iter()
        .map(|&v| match model.variable(v).role {
            Role::Assign(e) => e,
            _ => unreachable!(),
        })
        .collect();
    projections(model, |r| matches!(r, Role::Assign(_)))
        .into_iter()
        .map(|x| {
            let mut m = vec![None; inst.num_applicants()];
            for (k, &value) in x.iter().enumerate() {
                if value == 1 {
                    m[inst.application(apps[k]).applicant] = Some(apps[k]);
                }
            }
            m
        })
        .collect()
}

/// Matchings together with open flags from the model's feasible set.
pub fn model_open_matchings(inst: &Instance, model: &LinearModel) -> BTreeSet<(Assignments, Vec<bool>)> {
    let vars = model.vars_where(|r| matches!(r, Role::Assign(_) | Role::Open(_)));
    let e = enumerate_feasible(model, &vars, CAP).unwrap();
    assert!(!e.truncated);
    e.items
        .into_iter()
        .map(|vals| {
            let mut m = vec![None; inst.num_applicants()];
            let mut open = vec![true; inst.num_colleges()];
            for (k, &v) in vars.iter().enumerate() {
                match model.variable(v).role {
                    Role::Assign(e) if vals[k] == 1 => m[inst.application(e).applicant] = Some(e),
                    Role::Open(j) => open[j] = vals[k] == 1,
                    _ => {}
                }
            }
            (m, open)
        })
        .collect()
}

pub fn oracle_matchings(inst: &Instance, variant: Variant) -> BTreeSet<Assignments> {
    let s = enumerate_stable(inst, variant, CAP).unwrap();
    assert!(!s.truncated);
    s.solutions.iter().map(|s| s.matching.assignments().to_vec()).collect()
}

pub fn oracle_open_matchings(inst: &Instance) -> BTreeSet<(Assignments, Vec<bool>)> {
    let s = enumerate_stable(inst, Variant::Lower, CAP).unwrap();
    assert!(!s.truncated);
    s.solutions
        .iter()
        .map(|s| (s.matching.assignments().to_vec(), s.open.clone().unwrap()))
        .collect()
}

pub fn oracle_limits(inst: &Instance) -> BTreeSet<Vec<i64>> {
    let s = enumerate_stable(inst, Variant::ScorelimitsH, CAP).unwrap();
    assert!(!s.truncated);
    s.solutions.iter().map(|s| s.score_limits.clone().unwrap().0).collect()
}

/// Small random instance shape drawn from `seed`: 1..=6 applicants,
/// 1..=3 colleges.
pub fn small(seed: u64, max_score: i64) -> GenConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let colleges = rng.gen_range(1..=3);
    GenConfig {
        applicants: rng.gen_range(1..=6),
        colleges,
        list_len: (1, 3),
        max_score,
        upper: (1, 2),
        seed,
        ..Default::default()
    }
}

pub fn strict(seed: u64) -> Instance {
    generate(&small(seed, 5)).unwrap()
}

pub fn tied(seed: u64, max_score: i64) -> Instance {
    generate(&GenConfig {
        tie_density: 0.6,
        ..small(seed, max_score)
    })
    .unwrap()
}

pub fn with_lower(seed: u64) -> Instance {
    let base = small(seed, 9);
    let groups = if seed.is_multiple_of(4) && base.colleges >= 2 { 1 } else { 0 };
    generate(&GenConfig {
        upper: (1, 3),
        lower: (0, 2),
        lower_groups: groups,
        group_lower: (1, 3),
        ..base
    })
    .unwrap()
}

pub fn with_common(seed: u64, topology: Topology) -> Instance {
    let base = small(seed, 9);
    let sets = if base.colleges >= 2 { 1 + (seed as usize % 2) } else { 1 };
    generate(&GenConfig {
        topology,
        quota_sets: sets,
        set_upper: (1, 3),
        ..base
    })
    .unwrap()
}

pub fn with_pairs(seed: u64) -> Instance {
    let mut base = small(seed, 9);
    base.colleges = base.colleges.max(2);
    base.applicants = base.applicants.min(5);
    generate(&GenConfig {
        paired_prob: 0.35,
        ..base
    })
    .unwrap()
}

/// Four colleges with two random quota sets; often crossing.
pub fn four_college_common(seed: u64) -> Instance {
    let base = small(seed, 9);
    generate(&GenConfig {
        colleges: 4,
        applicants: base.applicants.clamp(3, 5),
        topology: Topology::Random,
        quota_sets: 2,
        set_upper: (1, 3),
        ..base
    })
    .unwrap()
}
