//! Applicant- and college-proposing deferred acceptance next to the
//! classical stable-matching model with rank-sum objectives.

use stable_admissions::algorithms::{da, Side};
use stable_admissions::formulations::{build_classical, extract_solution, ClassicalObjective, ClassicalOptions};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::solver::{solve, Limits};

fn main() {
    let inst = InstanceBuilder::new(9)
        .college("c1", 1)
        .college("c2", 1)
        .applicant("a1", &[Choice::single("c1", 3), Choice::single("c2", 8)])
        .applicant("a2", &[Choice::single("c2", 2), Choice::single("c1", 7)])
        .build()
        .unwrap();

    for side in [Side::Applicant, Side::College] {
        let m = da(&inst, side).unwrap();
        println!("DA {side:?}: {:?}", m.describe(&inst));
    }
    for objective in [ClassicalObjective::ApplicantOptimal, ClassicalObjective::ApplicantPessimal] {
        let model = build_classical(&inst, ClassicalOptions { ties: false, objective }).unwrap();
        let r = solve(&model, &Limits::none()).unwrap();
        let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
        println!("IP {objective:?}: {:?} (rank sum {:?})", sol.matching.describe(&inst), r.objective_values);
    }
}
