use crate::instance::{Instance, Target};
use crate::model::{LinExpr, LinearModel, Relation, Role, Tag, VarId};
use crate::precondition::{PreconditionError, Require};

use super::{
    applicant_feasible, assignment_vars, big_m, college_feasible, entity, filled_closure,
    limit_vars, name, weakly_preferred,
};

/// Stable matchings with paired applications, written out directly: a pair
/// takes a seat at both colleges, must reach both limits when admitted, and
/// when rejected misses the limit of the college picked by `y_i^(jk)`.
pub fn build_paired(inst: &Instance) -> Result<LinearModel, PreconditionError> {
    Require(inst).no_common()?.no_lower()?.no_ties()?;
    let big = big_m(inst);
    let mut model = LinearModel::new("paired");
    let x = assignment_vars(&mut model, inst);
    let t = limit_vars(&mut model, inst);
    let y: Vec<Option<VarId>> = (0..inst.applications().len())
        .map(|e| {
            inst.application(e)
                .is_paired()
                .then(|| model.add_binary(format!("yq({})", entity(inst, e)), Role::PairException(e)))
        })
        .collect();
    applicant_feasible(&mut model, inst, &x, Tag::PairedApplicantFeasible);
    college_feasible(&mut model, inst, &x, Tag::PairedCollegeFeasible);

    let admitted = |model: &mut LinearModel, e: usize, j: usize, s: i64, tag: Tag| {
        model.constrain(
            name(tag, &entity(inst, e)),
            tag,
            t[j],
            Relation::Le,
            (LinExpr::constant(1) - x[e]) * big + s,
        );
    };
    for e in 0..inst.applications().len() {
        match inst.application(e).target {
            Target::Single { college, score } => {
                admitted(&mut model, e, college, score, Tag::SimpleLimitAdmitted);
                model.constrain(
                    name(Tag::SimpleLimitRejected, &entity(inst, e)),
                    Tag::SimpleLimitRejected,
                    LinExpr::constant(score + 1),
                    Relation::Le,
                    LinExpr::from(t[college]) + weakly_preferred(inst, &x, e) * big,
                );
            }
            Target::Pair { colleges: [j, k], scores: [sj, sk] } => {
                admitted(&mut model, e, j, sj, Tag::PairLimitAdmittedFirst);
                admitted(&mut model, e, k, sk, Tag::PairLimitAdmittedSecond);
                let yq = y[e].expect("paired application has an exception variable");
                model.constrain(
                    name(Tag::PairLimitRejectedFirst, &entity(inst, e)),
                    Tag::PairLimitRejectedFirst,
                    LinExpr::constant(sj + 1),
                    Relation::Le,
                    LinExpr::from(t[j]) + (weakly_preferred(inst, &x, e) + yq) * big,
                );
                model.constrain(
                    name(Tag::PairLimitRejectedSecond, &entity(inst, e)),
                    Tag::PairLimitRejectedSecond,
                    LinExpr::constant(sk + 1),
                    Relation::Le,
                    LinExpr::from(t[k]) + (weakly_preferred(inst, &x, e) + 1 - yq) * big,
                );
            }
        }
    }
    filled_closure(
        &mut model,
        inst,
        &x,
        &t,
        (Tag::PairedFilledIndicator, Tag::PairedUnfilledLimit),
    );
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Choice, InstanceBuilder};
    use crate::solver::enumerate_feasible;

    #[test]
    fn uncontested_pair() {
        let inst = InstanceBuilder::new(9)
            .college("c1", 1)
            .college("c2", 1)
            .applicant("a1", &[Choice::pair("c1", "c2", 5, 5)])
            .build()
            .unwrap();
        let model = build_paired(&inst).unwrap();
        let vars = model.vars_where(|r| matches!(r, Role::Assign(_) | Role::Limit(_)));
        let e = enumerate_feasible(&model, &vars, 100).unwrap();
        // Both colleges are full, so any limits the applicant reaches are valid.
        assert!(e.items.contains(&vec![1, 0, 0]));
        assert_eq!(e.items.len(), 36);
        assert!(e.items.iter().all(|v| v[0] == 1));
    }

    #[test]
    fn simple_applicant_outbids_the_pair() {
        let inst = InstanceBuilder::new(9)
            .college("c1", 1)
            .college("c2", 1)
            .applicant("A", &[Choice::pair("c1", "c2", 3, 3)])
            .applicant("B", &[Choice::single("c1", 7)])
            .build()
            .unwrap();
        let model = build_paired(&inst).unwrap();
        let vars = model.vars_where(|r| {
            matches!(r, Role::Assign(_) | Role::Limit(_) | Role::PairException(_))
        });
        let e = enumerate_feasible(&model, &vars, 100).unwrap();
        // x(A,c1&c2), x(B,c1), t(c1), t(c2), yq: B admitted, t_1 in 4..=7, t_2 = 0,
        // and the rejection is carried by c1 (y = 0).
        let expected: Vec<Vec<i64>> = (4..=7).map(|t1| vec![0, 1, t1, 0, 0]).collect();
        assert_eq!(e.items, expected);
    }

    #[test]
    fn tag_set_covers_every_paired_condition() {
        use Tag::*;
        let inst = InstanceBuilder::new(9)
            .college("c1", 1)
            .college("c2", 1)
            .applicant("A", &[Choice::pair("c1", "c2", 3, 3)])
            .applicant("B", &[Choice::single("c1", 7)])
            .build()
            .unwrap();
        let tags: Vec<Tag> = build_paired(&inst).unwrap().tags().into_iter().collect();
        assert_eq!(
            tags,
            vec![
                PairedApplicantFeasible,
                PairedCollegeFeasible,
                SimpleLimitAdmitted,
                SimpleLimitRejected,
                PairLimitAdmittedFirst,
                PairLimitAdmittedSecond,
                PairLimitRejectedFirst,
                PairLimitRejectedSecond,
                PairedFilledIndicator,
                PairedUnfilledLimit
            ]
        );
    }
}
