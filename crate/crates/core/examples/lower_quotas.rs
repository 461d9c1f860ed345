//! Lower quotas: the closing heuristic can end in an unstable outcome where
//! the exact model finds a stable one. Preprocessing fixes some open flags.

use stable_admissions::algorithms::lower_quota_heuristic;
use stable_admissions::formulations::{build_lower, extract_solution, Solution};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::oracle::{check, Variant};
use stable_admissions::preprocess::fix_iterate;
use stable_admissions::solver::{solve, Limits};

fn main() {
    let inst = InstanceBuilder::new(9)
        .college("c1", 2)
        .college_with_lower("c2", 2, 2)
        .college_with_lower("c3", 3, 2)
        .applicant("a1", &[Choice::single("c1", 6)])
        .applicant("a2", &[Choice::single("c2", 4)])
        .applicant("a3", &[Choice::single("c1", 7)])
        .applicant("a4", &[Choice::single("c3", 3), Choice::single("c2", 8)])
        .applicant("a5", &[Choice::single("c1", 0)])
        .build()
        .unwrap();

    let h = lower_quota_heuristic(&inst).unwrap();
    let mut hsol = Solution::from_matching(h.matching);
    hsol.open = Some(h.closed.iter().map(|c| !c).collect());
    let report = check(&inst, &hsol, Variant::Lower).unwrap();
    println!("heuristic closed {:?}: {}", h.closed, report.verdict.label());
    for v in &report.violations {
        println!("  {}: {}", v.kind.label(), v.explanation);
    }

    let model = build_lower(&inst, false).unwrap();
    let r = solve(&model, &Limits::none()).unwrap();
    let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
    println!(
        "model: open {:?}, matching {:?}, {}",
        sol.open.as_ref().unwrap(),
        sol.matching.describe(&inst),
        check(&inst, &sol, Variant::Lower).unwrap().verdict.label()
    );

    let fixing = fix_iterate(&inst).unwrap();
    println!("must open {:?}, must close {:?}", fixing.must_open, fixing.must_close);
}
