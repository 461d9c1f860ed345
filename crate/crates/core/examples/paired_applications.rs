//! Paired applications (a seat at two colleges at once), solved with the
//! direct model and through the common-quota reduction.

use stable_admissions::formulations::{build_paired, build_paired_via_common, extract_solution};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::oracle::{check, Variant};
use stable_admissions::solver::{solve, Limits};

fn main() {
    let inst = InstanceBuilder::new(9)
        .college("c1", 1)
        .college("c2", 2)
        .applicant("a1", &[Choice::pair("c1", "c2", 7, 3), Choice::single("c2", 3)])
        .applicant("a2", &[Choice::single("c1", 5)])
        .applicant("a3", &[Choice::single("c2", 6)])
        .build()
        .unwrap();

    for model in [build_paired(&inst).unwrap(), build_paired_via_common(&inst).unwrap()] {
        let r = solve(&model, &Limits::none()).unwrap();
        let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
        println!(
            "{}: {:?}, {}",
            model.name,
            sol.matching.describe(&inst),
            check(&inst, &sol, Variant::Paired).unwrap().verdict.label()
        );
    }
}
