//! Score-limits with tied scores: two applicants tie for one seat, so both
//! are rejected. Compares the tie-minimal model, the witness model and the
//! Gale-Shapley style limit processes.

use stable_admissions::algorithms::{gs_scorelimits, Side};
use stable_admissions::formulations::{build_scorelimits, extract_solution, LimitMode};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::oracle::{check, Variant};
use stable_admissions::solver::{solve, Limits};

fn main() {
    let inst = InstanceBuilder::new(5)
        .college("c1", 1)
        .college("c2", 2)
        .applicant("a1", &[Choice::single("c1", 5), Choice::single("c2", 1)])
        .applicant("a2", &[Choice::single("c1", 5)])
        .applicant("a3", &[Choice::single("c2", 4)])
        .build()
        .unwrap();

    for mode in [LimitMode::TiesMin, LimitMode::TiesFull] {
        let model = build_scorelimits(&inst, mode).unwrap();
        let r = solve(&model, &Limits::none()).unwrap();
        let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
        let verdict = check(&inst, &sol, Variant::ScorelimitsH).unwrap().verdict;
        println!(
            "{}: limits {:?}, matching {:?}, {}",
            mode.label(),
            sol.score_limits.unwrap().0,
            sol.matching.describe(&inst),
            verdict.label()
        );
    }
    let (_, low) = gs_scorelimits(&inst, Side::Applicant).unwrap();
    let (_, high) = gs_scorelimits(&inst, Side::College).unwrap();
    println!("stable limits range from {:?} to {:?}", low.0, high.0);
}
