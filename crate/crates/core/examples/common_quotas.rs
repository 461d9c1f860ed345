//! A common quota shared by two colleges caps their joint intake.

use stable_admissions::formulations::{build_common, extract_solution};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::oracle::{check, enumerate_stable, Variant};
use stable_admissions::solver::{solve, Limits};

fn main() {
    let inst = InstanceBuilder::new(9)
        .college("c1", 2)
        .college("c2", 2)
        .college("c3", 1)
        .applicant("a1", &[Choice::single("c1", 8), Choice::single("c3", 2)])
        .applicant("a2", &[Choice::single("c2", 6), Choice::single("c3", 5)])
        .applicant("a3", &[Choice::single("c1", 4)])
        .common_quota("p1", &["c1", "c2"], 2)
        .build()
        .unwrap();

    let model = build_common(&inst).unwrap();
    let r = solve(&model, &Limits::none()).unwrap();
    let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
    println!("matching {:?}", sol.matching.describe(&inst));
    println!("college limits {:?}, set limits {:?}", sol.score_limits.as_ref().unwrap().0, sol.set_limits);
    println!("oracle: {}", check(&inst, &sol, Variant::Common).unwrap().verdict.label());
    let all = enumerate_stable(&inst, Variant::Common, 100).unwrap();
    println!("{} stable matchings in total", all.solutions.len());
}
