use crate::instance::Instance;
use crate::model::{LinExpr, LinearModel, Relation, Tag};
use crate::precondition::{PreconditionError, Require};

use super::{
    applicant_feasible, assignment_vars, entity, lower_feasible, lower_group_stable, lower_groups,
    name, open_vars, weakly_preferred,
};

/// Stable matchings with lower quotas: every college is open (intake within
/// `[l_j, u_j]`) or closed (empty). Open colleges admit no blocking pair and
/// closed ones face no blocking group of `l_j` unsatisfied applicants.
///
/// With `with_groups`, members of a lower-quota group open or close together
/// and an open group must reach its shared lower quota in total.
pub fn build_lower(inst: &Instance, with_groups: bool) -> Result<LinearModel, PreconditionError> {
    let req = Require(inst).no_paired()?.no_common()?.no_ties()?;
    if !with_groups {
        req.no_groups()?;
    }
    let mut model = LinearModel::new(if with_groups { "lower-groups" } else { "lower" });
    let x = assignment_vars(&mut model, inst);
    let o = open_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    lower_feasible(&mut model, inst, &x, &o);

    for e in 0..inst.applications().len() {
        let (j, s) = inst.application(e).single().expect("no paired applications");
        let u = i64::from(inst.college(j).upper);
        let better = LinExpr::sum(
            inst.applications_at(j)
                .iter()
                .copied()
                .filter(|&h| inst.application(h).score_at(j).expect("at college") > s)
                .map(|h| x[h]),
        );
        model.constrain(
            name(Tag::LowerOpenStable, &entity(inst, e)),
            Tag::LowerOpenStable,
            weakly_preferred(inst, &x, e) * u + better,
            Relation::Ge,
            LinExpr::term(o[j], u),
        );
    }
    lower_group_stable(&mut model, inst, &x, &o);
    if with_groups {
        lower_groups(&mut model, inst, &x, &o);
    }
    Ok(model)
}
