//! Common upper quotas over sets of colleges, and the reduction of paired
//! applications to common quotas.

use std::collections::BTreeMap;

use crate::instance::{Instance, Score, Target};
use crate::model::{LinExpr, LinearModel, Relation, Role, Tag, VarId};
use crate::precondition::{PreconditionError, Require};

use super::{applicant_feasible, assignment_vars, big_m, entity, name, weakly_preferred};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SetKind {
    /// `{c_j}` (or, for the paired reduction, `c_j` with every pair touching it).
    College(usize),
    Explicit(usize),
    /// Singleton of an artificial college (a simple seat or a pair).
    Artificial,
}

#[derive(Debug, Clone)]
struct QuotaGroup {
    label: String,
    upper: u32,
    kind: SetKind,
}

/// A common-quota market: colleges (real or artificial), one application per
/// instance application, and quota sets with the score each application
/// carries inside each set containing its college.
#[derive(Debug, Clone)]
pub(crate) struct System {
    sets: Vec<QuotaGroup>,
    /// Per application: `(set, score)` for every set containing its college.
    memberships: Vec<Vec<(usize, Score)>>,
}

impl System {
    /// Singletons `{c_j}` with quota `u_j` plus the explicit quota sets.
    pub(crate) fn common(inst: &Instance) -> Self {
        let mut sets: Vec<QuotaGroup> = inst
            .colleges()
            .iter()
            .enumerate()
            .map(|(j, c)| QuotaGroup {
                label: c.id.clone(),
                upper: c.upper,
                kind: SetKind::College(j),
            })
            .collect();
        sets.extend(inst.quota_sets().iter().enumerate().map(|(p, q)| QuotaGroup {
            label: q.id.clone(),
            upper: q.upper,
            kind: SetKind::Explicit(p),
        }));
        let memberships = inst
            .applications()
            .iter()
            .map(|app| {
                let (j, s) = app.single().expect("no paired applications");
                let mut m = vec![(j, s)];
                for (p, q) in inst.quota_sets().iter().enumerate() {
                    if q.members.contains(&j) {
                        m.push((inst.num_colleges() + p, s));
                    }
                }
                m
            })
            .collect();
        System { sets, memberships }
    }

    /// Simple seats at `c_j` and each distinct pair become artificial
    /// colleges; each real college's quota becomes a common quota over its
    /// simple seat and every pair containing it.
    pub(crate) fn paired(inst: &Instance) -> Self {
        let mut sets: Vec<QuotaGroup> = inst
            .colleges()
            .iter()
            .enumerate()
            .map(|(j, c)| QuotaGroup {
                label: c.id.clone(),
                upper: c.upper,
                kind: SetKind::College(j),
            })
            .collect();
        let mut artificial: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let mut simple: BTreeMap<usize, usize> = BTreeMap::new();
        let loose = u32::try_from(inst.num_applicants() + 1).unwrap_or(u32::MAX);
        let memberships = (0..inst.applications().len())
            .map(|e| match inst.application(e).target {
                Target::Single { college, score } => {
                    let set = *simple.entry(college).or_insert_with(|| {
                        sets.push(QuotaGroup {
                            label: format!("{}*", inst.college(college).id),
                            upper: inst.college(college).upper,
                            kind: SetKind::Artificial,
                        });
                        sets.len() - 1
                    });
                    vec![(college, score), (set, score)]
                }
                Target::Pair { colleges, scores } => {
                    let key = [colleges[0].min(colleges[1]), colleges[0].max(colleges[1])];
                    let set = *artificial.entry(key).or_insert_with(|| {
                        sets.push(QuotaGroup {
                            label: format!(
                                "{}&{}",
                                inst.college(key[0]).id,
                                inst.college(key[1]).id
                            ),
                            upper: loose,
                            kind: SetKind::Artificial,
                        });
                        sets.len() - 1
                    });
                    vec![
                        (colleges[0], scores[0]),
                        (colleges[1], scores[1]),
                        (set, scores[0]),
                    ]
                }
            })
            .collect();
        System { sets, memberships }
    }

    fn limit_name(&self, set: usize) -> String {
        let g = &self.sets[set];
        match g.kind {
            SetKind::Explicit(_) => format!("tp({})", g.label),
            _ => format!("t({})", g.label),
        }
    }

    fn filled_name(&self, set: usize) -> String {
        let g = &self.sets[set];
        match g.kind {
            SetKind::Explicit(_) => format!("fp({})", g.label),
            _ => format!("f({})", g.label),
        }
    }
}

/// How the set score-limits are pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SetClosure {
    /// Unfilled sets have zero limits (strict scores).
    Filled,
    /// Left to an objective.
    None,
}

/// Emits quota feasibility and score-limit stability for `sys`. With `open`,
/// rejection rows are relaxed at closed colleges. Returns the limit
/// variables, one per set.
pub(crate) fn emit_system(
    model: &mut LinearModel,
    inst: &Instance,
    sys: &System,
    x: &[VarId],
    closure: SetClosure,
    open: Option<&[VarId]>,
) -> Vec<VarId> {
    let big = big_m(inst);
    let members: Vec<Vec<usize>> = {
        let mut members = vec![Vec::new(); sys.sets.len()];
        for (e, ms) in sys.memberships.iter().enumerate() {
            for &(p, _) in ms {
                members[p].push(e);
            }
        }
        members
    };
    let total = |p: usize| LinExpr::sum(members[p].iter().map(|&e| x[e]));

    for (p, g) in sys.sets.iter().enumerate() {
        model.constrain(
            name(Tag::CommonFeasible, &g.label),
            Tag::CommonFeasible,
            total(p),
            Relation::Le,
            i64::from(g.upper),
        );
    }
    let t: Vec<VarId> = (0..sys.sets.len())
        .map(|p| {
            let role = match sys.sets[p].kind {
                SetKind::College(j) => Role::Limit(j),
                SetKind::Explicit(q) => Role::SetLimit(q),
                SetKind::Artificial => Role::Other,
            };
            model.add_var(sys.limit_name(p), 0, big, role)
        })
        .collect();

    let mut exceptions: BTreeMap<(usize, usize), VarId> = BTreeMap::new();
    for (e, ms) in sys.memberships.iter().enumerate() {
        let applicant = inst.application(e).applicant;
        for &(p, _) in ms {
            exceptions.entry((applicant, p)).or_insert_with(|| {
                let who = &inst.applicants()[applicant].id;
                let (label, role) = match sys.sets[p].kind {
                    SetKind::College(j) => (
                        format!("ys({who},{})", sys.sets[p].label),
                        Role::SingletonException { applicant, college: j },
                    ),
                    SetKind::Explicit(q) => (
                        format!("yp({who},{})", sys.sets[p].label),
                        Role::SetException { applicant, set: q },
                    ),
                    SetKind::Artificial => {
                        (format!("ys({who},{})", sys.sets[p].label), Role::Other)
                    }
                };
                model.add_binary(label, role)
            });
        }
    }

    for (e, ms) in sys.memberships.iter().enumerate() {
        for &(p, s) in ms {
            let tag = Tag::CommonLimitAdmitted;
            model.constrain(
                name(tag, &format!("{}@{}", entity(inst, e), sys.sets[p].label)),
                tag,
                t[p],
                Relation::Le,
                (LinExpr::constant(1) - x[e]) * big + s,
            );
        }
    }
    for (e, ms) in sys.memberships.iter().enumerate() {
        let app = inst.application(e);
        for &(p, s) in ms {
            let y = exceptions[&(app.applicant, p)];
            let mut slack = weakly_preferred(inst, x, e) + y;
            let tag = match open {
                Some(o) => {
                    let (j, _) = app.single().expect("lower quotas only with simple applications");
                    slack = slack + 1 - o[j];
                    Tag::CommonLowerLimitRejected
                }
                None => Tag::CommonLimitRejected,
            };
            model.constrain(
                name(tag, &format!("{}@{}", entity(inst, e), sys.sets[p].label)),
                tag,
                LinExpr::constant(s + 1),
                Relation::Le,
                LinExpr::from(t[p]) + slack * big,
            );
        }
    }
    for (e, ms) in sys.memberships.iter().enumerate() {
        let applicant = inst.application(e).applicant;
        let ys = LinExpr::sum(ms.iter().map(|&(p, _)| exceptions[&(applicant, p)]));
        model.constrain(
            name(Tag::CommonException, &entity(inst, e)),
            Tag::CommonException,
            ys,
            Relation::Le,
            ms.len() as i64 - 1,
        );
    }

    if closure == SetClosure::Filled {
        let f: Vec<VarId> = (0..sys.sets.len())
            .map(|p| {
                let role = match sys.sets[p].kind {
                    SetKind::College(j) => Role::Filled(j),
                    SetKind::Explicit(q) => Role::SetFilled(q),
                    SetKind::Artificial => Role::Other,
                };
                model.add_binary(sys.filled_name(p), role)
            })
            .collect();
        for (p, g) in sys.sets.iter().enumerate() {
            model.constrain(
                name(Tag::CommonFilledIndicator, &g.label),
                Tag::CommonFilledIndicator,
                LinExpr::term(f[p], i64::from(g.upper)),
                Relation::Le,
                total(p),
            );
        }
        for (p, g) in sys.sets.iter().enumerate() {
            model.constrain(
                name(Tag::CommonUnfilledLimit, &g.label),
                Tag::CommonUnfilledLimit,
                t[p],
                Relation::Le,
                LinExpr::term(f[p], big),
            );
        }
    }
    t
}

/// Stable matchings under common quotas: each set `C_p` (every singleton
/// `{c_j}` included) carries a score-limit `t_p`, admitted applicants reach
/// the limits of all sets containing their college, and a rejected applicant
/// misses the limit of at least one of them.
pub fn build_common(inst: &Instance) -> Result<LinearModel, PreconditionError> {
    Require(inst).no_paired()?.no_lower()?.no_ties_in_sets()?;
    let mut model = LinearModel::new("common");
    let x = assignment_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    emit_system(&mut model, inst, &System::common(inst), &x, SetClosure::Filled, None);
    Ok(model)
}

/// Paired applications solved as a common-quota market: pairs become
/// artificial colleges and real quotas become common quotas.
pub fn build_paired_via_common(inst: &Instance) -> Result<LinearModel, PreconditionError> {
    Require(inst).no_common()?.no_lower()?.no_ties()?;
    let mut model = LinearModel::new("paired-via-common");
    let x = assignment_vars(&mut model, inst);
    applicant_feasible(&mut model, inst, &x, Tag::ApplicantFeasible);
    emit_system(&mut model, inst, &System::paired(inst), &x, SetClosure::Filled, None);
    Ok(model)
}
