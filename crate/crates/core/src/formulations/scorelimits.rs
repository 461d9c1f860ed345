use crate::instance::Instance;
use crate::model::{LinExpr, LinearModel, Objective, Relation, Role, Sense, Tag, VarId};
use crate::precondition::{PreconditionError, Require};

use super::{
    applicant_feasible, assignment_vars, big_m, college_feasible, entity, filled_closure,
    intake, limit_admitted, limit_rejected, limit_vars, name,
};

/// How stability of the score-limits is closed off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// No ties; unfilled colleges must have a zero limit.
    Strict,
    /// Ties allowed; minimizing the limit sum yields the applicant-optimal vector.
    TiesMin,
    /// Ties allowed; witness variables describe every H-stable vector.
    TiesFull,
}

impl LimitMode {
    pub fn label(self) -> &'static str {
        match self {
            LimitMode::Strict => "strict",
            LimitMode::TiesMin => "ties-min",
            LimitMode::TiesFull => "ties-full",
        }
    }
}

/// Matching plus score-limit variables `t_j`; each applicant is admitted to
/// the first entry of their list whose limit they reach.
pub fn build_scorelimits(inst: &Instance, mode: LimitMode) -> Result<LinearModel, PreconditionError> {
    let req = Require(inst).no_paired()?.no_common()?.no_lower()?;
    if mode == LimitMode::Strict {
        req.no_ties()?;
    }
    let mut model = LinearModel::new(&format!("scorelimits-{}", mode.label()));
    let x = assignment_vars(&mut model, inst);
    let t = limit_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    college_feasible(&mut model, inst, &x, Tag::CollegeFeasible);
    limit_admitted(&mut model, inst, &x, &t, Tag::LimitAdmitted);
    limit_rejected(&mut model, inst, &x, &t, |_| LinExpr::constant(0), Tag::LimitRejected);
    match mode {
        LimitMode::Strict => filled_closure(
            &mut model,
            inst,
            &x,
            &t,
            (Tag::FilledIndicator, Tag::UnfilledLimit),
        ),
        LimitMode::TiesMin => model.set_objective(min_limit_sum(&t)),
        LimitMode::TiesFull => witness_system(&mut model, inst, &x, &t),
    }
    Ok(model)
}

pub(crate) fn min_limit_sum(t: &[VarId]) -> Objective {
    Objective::new("limit_sum", Sense::Minimize, LinExpr::sum(t.iter().copied()))
}

/// Every positive `t_j` would overflow `u_j` if lowered by one: `y_j` marks
/// positive limits and `d_e` the applicants who desire `c_j` over their
/// match and would reach `t_j - 1`.
pub(crate) fn witness_system(model: &mut LinearModel, inst: &Instance, x: &[VarId], t: &[VarId]) {
    let big = big_m(inst);
    let s_bar = inst.max_score();
    let m = inst.num_colleges() as i64;
    let y: Vec<VarId> = (0..inst.num_colleges())
        .map(|j| model.add_binary(format!("y({})", inst.college(j).id), Role::Positive(j)))
        .collect();
    let d: Vec<VarId> = (0..inst.applications().len())
        .map(|e| model.add_binary(format!("d({})", entity(inst, e)), Role::Desire(e)))
        .collect();
    for j in 0..inst.num_colleges() {
        model.constrain(
            name(Tag::PositiveLimit, &inst.college(j).id),
            Tag::PositiveLimit,
            t[j],
            Relation::Le,
            LinExpr::term(y[j], big),
        );
    }
    for e in 0..inst.applications().len() {
        let app = inst.application(e);
        let not_better = LinExpr::sum(
            inst.list(app.applicant)
                .iter()
                .copied()
                .filter(|&k| inst.application(k).rank >= app.rank)
                .map(|k| d[k]),
        );
        model.constrain(
            name(Tag::Desires, &entity(inst, e)),
            Tag::Desires,
            not_better,
            Relation::Le,
            (LinExpr::constant(1) - x[e]) * m,
        );
    }
    for e in 0..inst.applications().len() {
        let (j, s) = inst.application(e).single().expect("simple applications only");
        model.constrain(
            name(Tag::Deserves, &entity(inst, e)),
            Tag::Deserves,
            LinExpr::from(t[j]) - 1,
            Relation::Le,
            (LinExpr::constant(1) - d[e]) * s_bar + s,
        );
    }
    for j in 0..inst.num_colleges() {
        let u1 = i64::from(inst.college(j).upper) + 1;
        let desiring = LinExpr::sum(inst.applications_at(j).iter().map(|&e| d[e]));
        model.constrain(
            name(Tag::LimitIrreducible, &inst.college(j).id),
            Tag::LimitIrreducible,
            (LinExpr::constant(1) - y[j]) * u1 + intake(inst, x, j) + desiring,
            Relation::Ge,
            u1,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::fixtures::{i1, i2, i3};
    use crate::formulations::{build_classical, ClassicalOptions};
    use crate::solver::{enumerate_feasible, solve, Limits, Status};

    #[test]
    fn strict_constraint_count() {
        let inst = i2();
        let model = build_scorelimits(&inst, LimitMode::Strict).unwrap();
        let (n, m, e) = (inst.num_applicants(), inst.num_colleges(), inst.applications().len());
        assert_eq!(model.constraints().len(), n + m + 2 * e + 2 * m);
    }

    #[test]
    fn tag_sets_per_mode() {
        use Tag::*;
        let inst = i3();
        let tags = |mode| build_scorelimits(&inst, mode).unwrap().tags().into_iter().collect::<Vec<_>>();
        assert_eq!(
            tags(LimitMode::TiesMin),
            vec![ApplicantFeasible, CollegeFeasible, LimitAdmitted, LimitRejected]
        );
        assert_eq!(
            tags(LimitMode::TiesFull),
            vec![
                ApplicantFeasible,
                CollegeFeasible,
                LimitAdmitted,
                LimitRejected,
                PositiveLimit,
                Desires,
                Deserves,
                LimitIrreducible
            ]
        );
        let strict = build_scorelimits(&i2(), LimitMode::Strict).unwrap();
        assert!(strict.tags().contains(&FilledIndicator));
        assert!(strict.tags().contains(&UnfilledLimit));
        assert!(build_scorelimits(&inst, LimitMode::Strict).is_err());
    }

    #[test]
    fn strict_limit_range_on_i2() {
        let model = build_scorelimits(&i2(), LimitMode::Strict).unwrap();
        let t = model.find("t(c1)").unwrap();
        let e = enumerate_feasible(&model, &[t], 100).unwrap();
        assert_eq!(e.items, vec![vec![4], vec![5], vec![6], vec![7]]);
    }

    #[test]
    fn strict_limit_range_on_i1() {
        let model = build_scorelimits(&i1(), LimitMode::Strict).unwrap();
        let t = model.find("t(c1)").unwrap();
        let e = enumerate_feasible(&model, &[t], 100).unwrap();
        assert_eq!(e.items, (0..=5).map(|v| vec![v]).collect::<Vec<_>>());
    }

    #[test]
    fn ties_min_rejects_the_tied_pair() {
        let model = build_scorelimits(&i3(), LimitMode::TiesMin).unwrap();
        let r = solve(&model, &Limits::none()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.objective_values, vec![6]);
        let t = model.find("t(c1)").unwrap();
        assert_eq!(r.assignment.unwrap()[t.0], 6);
    }

    #[test]
    fn ties_full_projects_to_the_single_stable_limit() {
        let model = build_scorelimits(&i3(), LimitMode::TiesFull).unwrap();
        let t = model.find("t(c1)").unwrap();
        let e = enumerate_feasible(&model, &[t], 100).unwrap();
        assert_eq!(e.items, vec![vec![6]]);
    }

    #[test]
    fn strict_and_classical_share_matchings() {
        let inst = i2();
        let x = |m: &LinearModel| m.vars_where(|r| matches!(r, Role::Assign(_)));
        let a = build_scorelimits(&inst, LimitMode::Strict).unwrap();
        let b = build_classical(&inst, ClassicalOptions::default()).unwrap();
        assert_eq!(
            enumerate_feasible(&a, &x(&a), 100).unwrap().items,
            enumerate_feasible(&b, &x(&b), 100).unwrap().items
        );
    }
}
