//! The combined model with ties, lower quotas and a common quota. Lower and
//! common quotas together require dropping group stability.

use stable_admissions::formulations::{build_combined, extract_solution, CombinedPolicy, GroupStability};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::oracle::audit_feasibility;
use stable_admissions::solver::{solve, Limits};

fn main() {
    let inst = InstanceBuilder::new(5)
        .college_with_lower("c1", 2, 2)
        .college("c2", 2)
        .college("c3", 1)
        .applicant("a1", &[Choice::single("c1", 4), Choice::single("c2", 4)])
        .applicant("a2", &[Choice::single("c2", 4), Choice::single("c1", 2)])
        .applicant("a3", &[Choice::single("c2", 4)])
        .applicant("a4", &[Choice::single("c3", 1), Choice::single("c1", 3)])
        .common_quota("p1", &["c2", "c3"], 2)
        .build()
        .unwrap();

    let enforce = CombinedPolicy { ties: true, lower: true, common: true, ..Default::default() };
    match build_combined(&inst, enforce) {
        Ok(_) => println!("enforce accepted"),
        Err(e) => println!("enforce rejected: {e}"),
    }
    let drop = CombinedPolicy { group_stability: GroupStability::DropWithLexObjective, ..enforce };
    let model = build_combined(&inst, drop).unwrap();
    let r = solve(&model, &Limits::none()).unwrap();
    let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
    println!("objectives (matched, limit sum): {:?}", r.objective_values);
    println!("matching {:?}, open {:?}", sol.matching.describe(&inst), sol.open);
    println!("feasibility audit: {}", audit_feasibility(&inst, &sol).unwrap().verdict.label());
}
