//! Extending a formulation by hand: force an applicant in and re-solve.

use stable_admissions::formulations::{build_scorelimits, extract_solution, LimitMode};
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::model::{LinExpr, Objective, Relation, Role, Sense, Tag};
use stable_admissions::solver::{solve, Limits, Status};

fn main() {
    let inst = InstanceBuilder::new(9)
        .college("c1", 1)
        .college("c2", 1)
        .applicant("a1", &[Choice::single("c1", 4), Choice::single("c2", 6)])
        .applicant("a2", &[Choice::single("c1", 7), Choice::single("c2", 3)])
        .build()
        .unwrap();

    let mut model = build_scorelimits(&inst, LimitMode::Strict).unwrap();
    let limits = model.vars_where(|r| matches!(r, Role::Limit(_)));
    model.set_objective(Objective::new("limit_sum", Sense::Minimize, LinExpr::sum(limits)));
    let r = solve(&model, &Limits::none()).unwrap();
    let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
    println!("min limits {:?}: {:?}", sol.score_limits.unwrap().0, sol.matching.describe(&inst));

    // Require a1 at c1 (application 0) on top of stability.
    let x = model.find_role(Role::Assign(0)).unwrap();
    model.constrain("force(a1,c1)", Tag::Auxiliary, x, Relation::Eq, 1);
    let r = solve(&model, &Limits::none()).unwrap();
    match r.status {
        Status::Infeasible => println!("no stable matching admits a1 at c1"),
        _ => {
            let sol = extract_solution(&inst, &model, r.assignment.as_ref().unwrap()).unwrap();
            println!("with a1 at c1: {:?}", sol.matching.describe(&inst));
        }
    }
}
