//! Integer programs for the admissions variants, one builder per
//! formulation, and extraction of typed solutions from solver assignments.
//!
//! Every constraint is named `<tag>(<entities>)`, e.g. `stable(a1,c1)` or
//! `college_feasible(c2)`, so a violation points straight at the offending row.

mod classical;
mod combined;
mod common;
mod lower;
mod paired;
mod scorelimits;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::instance::{Instance, Score};
use crate::matching::{Matching, ScoreLimits};
use crate::model::{LinExpr, LinearModel, Relation, Role, Tag, VarId, Violation};

pub use classical::{build_classical, ClassicalObjective, ClassicalOptions};
pub use combined::{build_combined, Closure, CombinedPolicy, GroupStability};
pub use common::{build_common, build_paired_via_common};
pub use lower::build_lower;
pub use paired::build_paired;
pub use scorelimits::{build_scorelimits, LimitMode};

/// Everything recoverable from one feasible assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub matching: Matching,
    /// `t_j` per college, when the model has score-limit variables.
    pub score_limits: Option<ScoreLimits>,
    /// `t_p` per explicit common quota set.
    pub set_limits: Option<Vec<Score>>,
    /// `o_j` per college, when the model has opening variables.
    pub open: Option<Vec<bool>>,
    /// `o_p` per lower-quota group.
    pub group_open: Option<Vec<bool>>,
    /// Every remaining variable by name.
    pub aux: BTreeMap<String, i64>,
}

impl Solution {
    pub fn from_matching(matching: Matching) -> Self {
        Solution {
            matching,
            score_limits: None,
            set_limits: None,
            open: None,
            group_open: None,
            aux: BTreeMap::new(),
        }
    }

    pub fn with_limits(matching: Matching, limits: ScoreLimits) -> Self {
        Solution {
            score_limits: Some(limits),
            ..Solution::from_matching(matching)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Infeasible(#[from] Violation),
    #[error("model variable {0} refers to an entity outside the instance")]
    Mismatch(String),
}

/// Reads a [`Solution`] out of a feasible assignment via the variable roles.
pub fn extract_solution(
    inst: &Instance,
    model: &LinearModel,
    values: &[i64],
) -> Result<Solution, ExtractError> {
    model.check(values)?;
    let mut matching = Matching::unmatched(inst.num_applicants());
    let mut limits: Option<Vec<Score>> = None;
    let mut set_limits: Option<Vec<Score>> = None;
    let mut open: Option<Vec<bool>> = None;
    let mut group_open: Option<Vec<bool>> = None;
    let mut aux = BTreeMap::new();
    let m = inst.num_colleges();
    for (v, &value) in model.variables().iter().zip(values) {
        let mismatch = || ExtractError::Mismatch(v.name.clone());
        match v.role {
            Role::Assign(e) => {
                if e >= inst.applications().len() {
                    return Err(mismatch());
                }
                if value == 1 {
                    matching.set(inst.application(e).applicant, Some(e));
                }
            }
            Role::Limit(j) if j < m => limits.get_or_insert_with(|| vec![0; m])[j] = value,
            Role::SetLimit(p) if p < inst.quota_sets().len() => {
                set_limits.get_or_insert_with(|| vec![0; inst.quota_sets().len()])[p] = value
            }
            Role::Open(j) if j < m => open.get_or_insert_with(|| vec![true; m])[j] = value == 1,
            Role::GroupOpen(p) if p < inst.lower_groups().len() => {
                group_open.get_or_insert_with(|| vec![true; inst.lower_groups().len()])[p] =
                    value == 1
            }
            Role::Limit(_) | Role::SetLimit(_) | Role::Open(_) | Role::GroupOpen(_) => {
                return Err(mismatch())
            }
            _ => {
                aux.insert(v.name.clone(), value);
            }
        }
    }
    Ok(Solution {
        matching,
        score_limits: limits.map(ScoreLimits),
        set_limits,
        open,
        group_open,
        aux,
    })
}

// Shared pieces of the builders.

pub(crate) fn big_m(inst: &Instance) -> i64 {
    inst.max_score() + 1
}

pub(crate) fn entity(inst: &Instance, e: usize) -> String {
    let app = inst.application(e);
    format!("{},{}", inst.applicants()[app.applicant].id, inst.target_label(e))
}

pub(crate) fn name(tag: Tag, args: &str) -> String {
    format!("{}({args})", tag.label())
}

/// One binary `x(a,target)` per application, in application order.
pub(crate) fn assignment_vars(model: &mut LinearModel, inst: &Instance) -> Vec<VarId> {
    (0..inst.applications().len())
        .map(|e| model.add_binary(format!("x({})", entity(inst, e)), Role::Assign(e)))
        .collect()
}

/// `t(c)` in `0..=max_score+1` per college.
pub(crate) fn limit_vars(model: &mut LinearModel, inst: &Instance) -> Vec<VarId> {
    (0..inst.num_colleges())
        .map(|j| {
            model.add_var(
                format!("t({})", inst.college(j).id),
                0,
                big_m(inst),
                Role::Limit(j),
            )
        })
        .collect()
}

pub(crate) fn open_vars(model: &mut LinearModel, inst: &Instance) -> Vec<VarId> {
    (0..inst.num_colleges())
        .map(|j| model.add_binary(format!("o({})", inst.college(j).id), Role::Open(j)))
        .collect()
}

/// Sum of `x` over the applications ranked at least as high as `e`.
pub(crate) fn weakly_preferred(inst: &Instance, x: &[VarId], e: usize) -> LinExpr {
    LinExpr::sum(inst.weakly_preferred(e).map(|k| x[k]))
}

/// Sum of `x` over the applications ranked strictly higher than `e`.
pub(crate) fn strictly_preferred(inst: &Instance, x: &[VarId], e: usize) -> LinExpr {
    LinExpr::sum(inst.strictly_preferred(e).map(|k| x[k]))
}

/// Seats taken at college `j` (paired admissions included).
pub(crate) fn intake(inst: &Instance, x: &[VarId], j: usize) -> LinExpr {
    LinExpr::sum(inst.applications_at(j).iter().map(|&e| x[e]))
}

pub(crate) fn applicant_feasible(model: &mut LinearModel, inst: &Instance, x: &[VarId], tag: Tag) {
    for i in 0..inst.num_applicants() {
        model.constrain(
            name(tag, &inst.applicants()[i].id),
            tag,
            LinExpr::sum(inst.list(i).iter().map(|&e| x[e])),
            Relation::Le,
            i64::from(1),
        );
    }
}

pub(crate) fn college_feasible(model: &mut LinearModel, inst: &Instance, x: &[VarId], tag: Tag) {
    for j in 0..inst.num_colleges() {
        model.constrain(
            name(tag, &inst.college(j).id),
            tag,
            intake(inst, x, j),
            Relation::Le,
            i64::from(inst.college(j).upper),
        );
    }
}

/// `t_j <= (1 - x_e)(s+1) + s_ej` for every simple application.
pub(crate) fn limit_admitted(
    model: &mut LinearModel,
    inst: &Instance,
    x: &[VarId],
    t: &[VarId],
    tag: Tag,
) {
    let big = big_m(inst);
    for e in 0..inst.applications().len() {
        let (j, s) = inst.application(e).single().expect("simple applications only");
        model.constrain(
            name(tag, &entity(inst, e)),
            tag,
            t[j],
            Relation::Le,
            (LinExpr::constant(1) - x[e]) * big + s,
        );
    }
}

/// `s_ej + 1 <= t_j + (sum of weakly preferred x + relax)(s+1)`.
pub(crate) fn limit_rejected(
    model: &mut LinearModel,
    inst: &Instance,
    x: &[VarId],
    t: &[VarId],
    relax: impl Fn(usize) -> LinExpr,
    tag: Tag,
) {
    let big = big_m(inst);
    for e in 0..inst.applications().len() {
        let (j, s) = inst.application(e).single().expect("simple applications only");
        model.constrain(
            name(tag, &entity(inst, e)),
            tag,
            LinExpr::constant(s + 1),
            Relation::Le,
            LinExpr::from(t[j]) + (weakly_preferred(inst, x, e) + relax(j)) * big,
        );
    }
}

/// `f_j` indicators with `f_j u_j <= intake` and `t_j <= f_j (s+1)`.
pub(crate) fn filled_closure(
    model: &mut LinearModel,
    inst: &Instance,
    x: &[VarId],
    t: &[VarId],
    tags: (Tag, Tag),
) {
    let f: Vec<VarId> = (0..inst.num_colleges())
        .map(|j| model.add_binary(format!("f({})", inst.college(j).id), Role::Filled(j)))
        .collect();
    for j in 0..inst.num_colleges() {
        model.constrain(
            name(tags.0, &inst.college(j).id),
            tags.0,
            LinExpr::term(f[j], i64::from(inst.college(j).upper)),
            Relation::Le,
            intake(inst, x, j),
        );
    }
    for j in 0..inst.num_colleges() {
        model.constrain(
            name(tags.1, &inst.college(j).id),
            tags.1,
            t[j],
            Relation::Le,
            LinExpr::term(f[j], big_m(inst)),
        );
    }
}

/// The lower-quota feasibility pair `o_j l_j <= intake <= o_j u_j`.
pub(crate) fn lower_feasible(model: &mut LinearModel, inst: &Instance, x: &[VarId], o: &[VarId]) {
    let tag = Tag::LowerFeasible;
    for j in 0..inst.num_colleges() {
        let c = inst.college(j);
        model.constrain(
            format!("{}:min", name(tag, &c.id)),
            tag,
            LinExpr::term(o[j], i64::from(c.lower)),
            Relation::Le,
            intake(inst, x, j),
        );
        model.constrain(
            format!("{}:max", name(tag, &c.id)),
            tag,
            intake(inst, x, j),
            Relation::Le,
            LinExpr::term(o[j], i64::from(c.upper)),
        );
    }
}

/// Blocking-group exclusion for closed colleges: fewer than `l_j` applicants
/// of `c_j` lack a strictly better place.
pub(crate) fn lower_group_stable(
    model: &mut LinearModel,
    inst: &Instance,
    x: &[VarId],
    o: &[VarId],
) {
    let tag = Tag::LowerGroupStable;
    let n = inst.num_applicants() as i64;
    for j in 0..inst.num_colleges() {
        let unsatisfied = inst
            .applications_at(j)
            .iter()
            .fold(LinExpr::constant(0), |acc, &e| {
                acc + LinExpr::constant(1) - strictly_preferred(inst, x, e)
            });
        let l = i64::from(inst.college(j).lower);
        model.constrain(
            name(tag, &inst.college(j).id),
            tag,
            unsatisfied,
            Relation::Le,
            (LinExpr::constant(1) - o[j]) * (l - 1) + LinExpr::term(o[j], n),
        );
    }
}

/// Group opening variables with all-or-nothing opening and the shared
/// lower quota on total group intake.
pub(crate) fn lower_groups(model: &mut LinearModel, inst: &Instance, x: &[VarId], o: &[VarId]) {
    for (p, g) in inst.lower_groups().iter().enumerate() {
        let op = model.add_binary(format!("og({})", g.id), Role::GroupOpen(p));
        let n_p = g.members.len() as i64;
        model.constrain(
            name(Tag::GroupOpening, &g.id),
            Tag::GroupOpening,
            LinExpr::sum(g.members.iter().map(|&j| o[j])),
            Relation::Eq,
            LinExpr::term(op, n_p),
        );
        let total = g
            .members
            .iter()
            .fold(LinExpr::constant(0), |acc, &j| acc + intake(inst, x, j));
        model.constrain(
            name(Tag::GroupLowerFeasible, &g.id),
            Tag::GroupLowerFeasible,
            LinExpr::term(op, i64::from(g.lower)),
            Relation::Le,
            total,
        );
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::instance::{Choice, Instance, InstanceBuilder};

    pub fn i1() -> Instance {
        InstanceBuilder::new(10)
            .college("c1", 1)
            .applicant("a1", &[Choice::single("c1", 5)])
            .build()
            .unwrap()
    }

    pub fn i2() -> Instance {
        InstanceBuilder::new(10)
            .college("c1", 1)
            .applicant("a1", &[Choice::single("c1", 7)])
            .applicant("a2", &[Choice::single("c1", 3)])
            .build()
            .unwrap()
    }

    pub fn i3() -> Instance {
        InstanceBuilder::new(5)
            .college("c1", 1)
            .applicant("a1", &[Choice::single("c1", 5)])
            .applicant("a2", &[Choice::single("c1", 5)])
            .build()
            .unwrap()
    }

    pub fn i4() -> Instance {
        InstanceBuilder::new(10)
            .college_with_lower("c1", 2, 2)
            .applicant("a1", &[Choice::single("c1", 5)])
            .build()
            .unwrap()
    }

    pub fn i4b() -> Instance {
        InstanceBuilder::new(10)
            .college_with_lower("c1", 2, 2)
            .applicant("a1", &[Choice::single("c1", 5)])
            .applicant("a2", &[Choice::single("c1", 6)])
            .build()
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, Limits};

    #[test]
    fn extraction_reads_roles() {
        let inst = fixtures::i1();
        let model = build_scorelimits(&inst, LimitMode::Strict).unwrap();
        let x = model.find("x(a1,c1)").unwrap();
        let t = model.find("t(c1)").unwrap();
        let f = model.find("f(c1)").unwrap();
        let mut values = vec![0; model.variables().len()];
        values[x.0] = 1;
        values[f.0] = 1;
        values[t.0] = 0;
        let sol = extract_solution(&inst, &model, &values).unwrap();
        assert_eq!(sol.matching.get(0), Some(0));
        assert_eq!(sol.score_limits, Some(ScoreLimits(vec![0])));
        assert_eq!(sol.aux.get("f(c1)"), Some(&1));
    }

    #[test]
    fn extraction_rejects_infeasible_assignment() {
        let inst = fixtures::i2();
        let model = build_classical(&inst, ClassicalOptions::default()).unwrap();
        let err = extract_solution(&inst, &model, &[1, 1]).unwrap_err();
        assert_eq!(err.to_string(), "constraint violated: college_feasible(c1)");
    }

    #[test]
    fn ties_min_optimum_on_i2() {
        let inst = fixtures::i2();
        let model = build_scorelimits(&inst, LimitMode::TiesMin).unwrap();
        let r = solve(&model, &Limits::none()).unwrap();
        let sol = extract_solution(&inst, &model, &r.assignment.unwrap()).unwrap();
        assert_eq!(sol.matching.get(0), Some(0));
        assert_eq!(sol.matching.get(1), None);
        assert_eq!(sol.score_limits, Some(ScoreLimits(vec![4])));
    }
}
