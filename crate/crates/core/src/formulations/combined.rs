use crate::instance::Instance;
use crate::model::{LinExpr, LinearModel, Objective, Sense, Tag, VarId};
use crate::precondition::{PreconditionError, Require};

use super::common::{emit_system, SetClosure, System};
use super::scorelimits::{min_limit_sum, witness_system};
use super::{
    applicant_feasible, assignment_vars, build_classical, build_common, build_lower,
    build_scorelimits, limit_admitted, limit_rejected, limit_vars, lower_feasible,
    lower_group_stable, lower_groups, open_vars, ClassicalOptions, LimitMode,
};

/// Whether blocking groups at closed colleges are ruled out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GroupStability {
    #[default]
    Enforce,
    /// Omit the blocking-group rows and instead maximize the number of
    /// admitted applicants, then minimize the score-limit sum.
    DropWithLexObjective,
}

/// How stability of tied score-limits is closed off.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Closure {
    /// Minimize the sum of all score-limits.
    #[default]
    MinLimitsObjective,
    /// Witness variables proving every positive limit irreducible.
    WitnessSystem,
}

/// Which special features the combined model handles. A feature present in
/// the instance must be switched on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CombinedPolicy {
    pub ties: bool,
    pub lower: bool,
    pub common: bool,
    pub group_stability: GroupStability,
    pub closure: Closure,
}

/// One model for any mix of ties, lower quotas and common quotas.
///
/// Lower quotas together with common quotas have no agreed notion of group
/// stability, so that mix requires [`GroupStability::DropWithLexObjective`].
/// The drop policy only changes models that have lower quotas.
pub fn build_combined(
    inst: &Instance,
    policy: CombinedPolicy,
) -> Result<LinearModel, PreconditionError> {
    let mut req = Require(inst).no_paired()?;
    if !policy.ties {
        req = req.no_ties()?;
        if policy.common {
            req = req.no_ties_in_sets()?;
        }
    }
    if !policy.lower {
        req = req.no_lower()?;
    }
    if !policy.common {
        req.no_common()?;
    }
    let drop = policy.group_stability == GroupStability::DropWithLexObjective;
    if policy.lower && policy.common && !drop {
        return Err(PreconditionError::Policy(
            "lower and common quotas together require drop_with_lex_objective".into(),
        ));
    }
    if policy.ties && policy.common && policy.closure == Closure::WitnessSystem {
        return Err(PreconditionError::Policy(
            "the witness closure is not available with common quotas".into(),
        ));
    }

    let mut model = match (policy.ties, policy.lower, policy.common) {
        (false, false, false) => build_classical(inst, ClassicalOptions::default())?,
        (true, false, false) => build_scorelimits(
            inst,
            match policy.closure {
                Closure::MinLimitsObjective => LimitMode::TiesMin,
                Closure::WitnessSystem => LimitMode::TiesFull,
            },
        )?,
        (false, false, true) => build_common(inst)?,
        (false, true, false) if !drop => build_lower(inst, true)?,
        (_, true, false) => lower_with_limits(inst, drop, policy.closure),
        (true, false, true) => ties_with_common(inst),
        (_, true, true) => lower_with_common(inst),
    };
    model.name = format!(
        "combined{}{}{}{}",
        if policy.ties { "-ties" } else { "" },
        if policy.lower { "-lower" } else { "" },
        if policy.common { "-common" } else { "" },
        if drop && policy.lower { "-lex" } else { "" },
    );
    Ok(model)
}

fn lex_objective(x: &[VarId], t: &[VarId]) -> Vec<Objective> {
    vec![
        Objective::new("matched", Sense::Maximize, LinExpr::sum(x.iter().copied())),
        Objective::new("limit_sum", Sense::Minimize, LinExpr::sum(t.iter().copied())),
    ]
}

/// Score-limits with lower quotas: rejection rows hold only at open colleges.
fn lower_with_limits(inst: &Instance, drop: bool, closure: Closure) -> LinearModel {
    let mut model = LinearModel::new("combined");
    let x = assignment_vars(&mut model, inst);
    let t = limit_vars(&mut model, inst);
    let o = open_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    lower_feasible(&mut model, inst, &x, &o);
    limit_admitted(&mut model, inst, &x, &t, Tag::LimitAdmitted);
    limit_rejected(
        &mut model,
        inst,
        &x,
        &t,
        |j| LinExpr::constant(1) - o[j],
        Tag::LowerLimitRejected,
    );
    lower_groups(&mut model, inst, &x, &o);
    if drop {
        model.set_objectives(lex_objective(&x, &t));
        return model;
    }
    lower_group_stable(&mut model, inst, &x, &o);
    match closure {
        Closure::MinLimitsObjective => model.set_objective(min_limit_sum(&t)),
        Closure::WitnessSystem => witness_system(&mut model, inst, &x, &t),
    }
    model
}

fn ties_with_common(inst: &Instance) -> LinearModel {
    let mut model = LinearModel::new("combined");
    let x = assignment_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    let t = emit_system(&mut model, inst, &System::common(inst), &x, SetClosure::None, None);
    model.set_objective(min_limit_sum(&t));
    model
}

fn lower_with_common(inst: &Instance) -> LinearModel {
    let mut model = LinearModel::new("combined");
    let x = assignment_vars(&mut model, inst);
    let o = open_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    lower_feasible(&mut model, inst, &x, &o);
    lower_groups(&mut model, inst, &x, &o);
    let t = emit_system(&mut model, inst, &System::common(inst), &x, SetClosure::None, Some(&o));
    model.set_objectives(lex_objective(&x, &t));
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::fixtures::{i2, i3, i4, i4b};
    use crate::model::Role;
    use crate::solver::{enumerate_feasible, solve, solve_lex, Limits, Status};

    #[test]
    fn degenerate_policy_is_classical() {
        let inst = i2();
        let a = build_combined(&inst, CombinedPolicy::default()).unwrap();
        let b = build_classical(&inst, ClassicalOptions::default()).unwrap();
        assert_eq!(a.constraints(), b.constraints());
        assert!(a.objectives().is_empty());
    }

    #[test]
    fn ties_and_lower_match_ties_min_without_lower_quotas() {
        let policy = CombinedPolicy {
            ties: true,
            lower: true,
            ..Default::default()
        };
        let model = build_combined(&i3(), policy).unwrap();
        let r = solve(&model, &Limits::none()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        let t = model.find("t(c1)").unwrap();
        assert_eq!(r.assignment.unwrap()[t.0], 6);
    }

    #[test]
    fn ties_and_lower_close_the_underfilled_college() {
        let policy = CombinedPolicy {
            ties: true,
            lower: true,
            ..Default::default()
        };
        let model = build_combined(&i4(), policy).unwrap();
        let vars = model.vars_where(|r| matches!(r, Role::Assign(_) | Role::Open(_)));
        let e = enumerate_feasible(&model, &vars, 100).unwrap();
        assert_eq!(e.items, vec![vec![0, 0]]);
    }

    #[test]
    fn drop_policy_is_lexicographic() {
        let policy = CombinedPolicy {
            lower: true,
            group_stability: GroupStability::DropWithLexObjective,
            ..Default::default()
        };
        let model = build_combined(&i4b(), policy).unwrap();
        assert!(!model.tags().contains(&Tag::LowerGroupStable));
        let r = solve_lex(&model, &Limits::none()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective_values, vec![2, 0]);
    }

    #[test]
    fn incoherent_policies_are_rejected() {
        let inst = i2();
        let both = CombinedPolicy {
            lower: true,
            common: true,
            ..Default::default()
        };
        assert!(matches!(build_combined(&inst, both), Err(PreconditionError::Policy(_))));
        // Feature present but switched off.
        assert!(matches!(
            build_combined(&i4(), CombinedPolicy::default()),
            Err(PreconditionError::LowerQuotas)
        ));
        assert!(matches!(
            build_combined(&i3(), CombinedPolicy::default()),
            Err(PreconditionError::Ties { .. })
        ));
    }
}
