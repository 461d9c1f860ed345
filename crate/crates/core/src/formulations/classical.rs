use crate::instance::Instance;
use crate::model::{LinExpr, LinearModel, Objective, Relation, Sense, Tag};
use crate::precondition::{PreconditionError, Require};

use super::{applicant_feasible, assignment_vars, college_feasible, entity, name, weakly_preferred};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ClassicalObjective {
    #[default]
    None,
    /// Minimize the rank sum.
    ApplicantOptimal,
    /// Maximize the rank sum.
    ApplicantPessimal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassicalOptions {
    /// Accept tied scores and use the weak (tie-tolerant) stability rows.
    pub ties: bool,
    pub objective: ClassicalObjective,
}

/// Matching feasibility plus the pairwise stability rows: for every
/// application, either the applicant holds something at least as good or the
/// college is full with higher scorers (weakly higher when `ties`).
pub fn build_classical(
    inst: &Instance,
    opts: ClassicalOptions,
) -> Result<LinearModel, PreconditionError> {
    let req = Require(inst).no_paired()?.no_common()?.no_lower()?;
    if !opts.ties {
        req.no_ties()?;
    }
    let mut model = LinearModel::new(if opts.ties { "classical-weak" } else { "classical" });
    let x = assignment_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    college_feasible(&mut model, inst, &x, Tag::CollegeFeasible);

    let tag = if opts.ties { Tag::StableTies } else { Tag::Stable };
    for e in 0..inst.applications().len() {
        let (j, s) = inst.application(e).single().expect("no paired applications");
        let u = i64::from(inst.college(j).upper);
        let better = LinExpr::sum(
            inst.applications_at(j)
                .iter()
                .copied()
                .filter(|&h| {
                    let sh = inst.application(h).score_at(j).expect("application at college");
                    if opts.ties {
                        sh >= s
                    } else {
                        sh > s
                    }
                })
                .map(|h| x[h]),
        );
        model.constrain(
            name(tag, &entity(inst, e)),
            tag,
            weakly_preferred(inst, &x, e) * u + better,
            Relation::Ge,
            u,
        );
    }

    let rank_sum = || {
        (0..inst.applications().len()).fold(LinExpr::constant(0), |acc, e| {
            acc + LinExpr::term(x[e], i64::from(inst.application(e).rank))
        })
    };
    match opts.objective {
        ClassicalObjective::None => {}
        ClassicalObjective::ApplicantOptimal => {
            model.set_objective(Objective::new("rank_sum", Sense::Minimize, rank_sum()))
        }
        ClassicalObjective::ApplicantPessimal => {
            model.set_objective(Objective::new("rank_sum", Sense::Maximize, rank_sum()))
        }
    }
    Ok(model)
}
