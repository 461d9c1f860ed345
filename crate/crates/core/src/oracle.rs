//! Definition-level stability checks and exhaustive enumeration of stable
//! solutions. Nothing here looks at a linear model; the checks follow the
//! verbal definitions of each variant.

use std::fmt;

use thiserror::Error;

use crate::formulations::Solution;
use crate::instance::{Instance, Score};
use crate::matching::{Matching, ScoreLimits};
use crate::precondition::{PreconditionError, Require};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Strict scores, no blocking pair.
    Classical,
    /// Tied scores allowed; a tie never blocks.
    WeakTies,
    /// Score-limits: induced matching within quotas, no limit reducible by one.
    ScorelimitsH,
    /// Lower quotas: open colleges meet them, closed colleges face no blocking group.
    Lower,
    /// Common upper quotas over sets of colleges.
    Common,
    /// Paired applications taking a seat at two colleges.
    Paired,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Classical,
        Variant::WeakTies,
        Variant::ScorelimitsH,
        Variant::Lower,
        Variant::Common,
        Variant::Paired,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Classical => "classical",
            Variant::WeakTies => "weak-ties",
            Variant::ScorelimitsH => "scorelimits-h",
            Variant::Lower => "lower",
            Variant::Common => "common",
            Variant::Paired => "paired",
        }
    }

    fn require(self, inst: &Instance) -> Result<(), PreconditionError> {
        let r = Require(inst);
        match self {
            Variant::Classical => r.no_paired()?.no_common()?.no_lower()?.no_ties()?,
            Variant::WeakTies | Variant::ScorelimitsH => r.no_paired()?.no_common()?.no_lower()?,
            Variant::Lower => r.no_paired()?.no_common()?.no_ties()?,
            Variant::Common => r.no_paired()?.no_lower()?.no_ties_in_sets()?,
            Variant::Paired => r.no_common()?.no_lower()?.no_ties()?,
        };
        Ok(())
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    QuotaBreach,
    CommonQuotaBreach,
    /// An admission below a score-limit, or an open/closed flag contradicting the intake.
    LimitNotMet,
    BlockingPair,
    BlockingGroup,
    ReducibleScoreLimit,
    PairedBlock,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::QuotaBreach => "quota_breach",
            Kind::CommonQuotaBreach => "common_quota_breach",
            Kind::LimitNotMet => "limit_not_met",
            Kind::BlockingPair => "blocking_pair",
            Kind::BlockingGroup => "blocking_group",
            Kind::ReducibleScoreLimit => "reducible_score_limit",
            Kind::PairedBlock => "paired_block",
        }
    }

    fn is_feasibility(self) -> bool {
        matches!(self, Kind::QuotaBreach | Kind::CommonQuotaBreach | Kind::LimitNotMet)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: Kind,
    /// Ids of the applicants, colleges or sets involved.
    pub involved: Vec<String>,
    pub explanation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    /// Some quota or limit is broken, so stability is moot.
    Infeasible,
    /// Every quota and limit holds; stability was not assessed.
    Feasible,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Infeasible => "infeasible",
            Verdict::Feasible => "feasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl StabilityReport {
    fn new(violations: Vec<Violation>) -> Self {
        let verdict = if violations.is_empty() {
            Verdict::Stable
        } else if violations.iter().any(|v| v.kind.is_feasibility()) {
            Verdict::Infeasible
        } else {
            Verdict::Unstable
        };
        StabilityReport {
            verdict,
            violations,
        }
    }

    pub fn is_stable(&self) -> bool {
        self.verdict == Verdict::Stable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Precondition(#[from] PreconditionError),
    #[error("solution shape: {0}")]
    Shape(String),
    #[error("instance too large for exhaustive enumeration ({size} candidates, limit {limit})")]
    TooLarge { size: u128, limit: u128 },
}

/// Upper bound on candidates visited by [`enumerate_stable`].
pub const ENUMERATION_LIMIT: u128 = 1 << 22;

/// Checks one solution against the definition of `variant`.
pub fn check(inst: &Instance, sol: &Solution, variant: Variant) -> Result<StabilityReport, OracleError> {
    variant.require(inst)?;
    check_shape(inst, sol, variant)?;
    let ctx = Ctx::new(inst, &sol.matching);
    let mut out = Vec::new();
    match variant {
        Variant::Classical => {
            ctx.college_quotas(&mut out);
            ctx.blocking_pairs(&mut out, |_| true, false);
        }
        Variant::WeakTies => {
            ctx.college_quotas(&mut out);
            ctx.blocking_pairs(&mut out, |_| true, true);
        }
        Variant::ScorelimitsH => {
            let t = sol.score_limits.as_ref().expect("checked by shape");
            ctx.college_quotas(&mut out);
            ctx.limit_consistency(t, &mut out);
            reducible_limits(inst, t, &mut out);
        }
        Variant::Lower => {
            let open = match &sol.open {
                Some(o) => o.clone(),
                None => derive_open(inst, &sol.matching),
            };
            ctx.lower_feasibility(&open, &mut out);
            ctx.blocking_pairs(&mut out, |j| open[j], false);
            ctx.blocking_groups(&open, &mut out);
        }
        Variant::Common => {
            ctx.college_quotas(&mut out);
            ctx.common(&mut out);
        }
        Variant::Paired => {
            ctx.college_quotas(&mut out);
            ctx.paired(&mut out);
        }
    }
    Ok(StabilityReport::new(out))
}

/// Quotas, lower quotas, groups and admissions against score-limits, for
/// feature mixes that have no single stability definition. Stability itself
/// is not assessed.
pub fn audit_feasibility(inst: &Instance, sol: &Solution) -> Result<StabilityReport, OracleError> {
    check_shape(inst, sol, Variant::Classical)?;
    let ctx = Ctx::new(inst, &sol.matching);
    let mut out = Vec::new();
    if inst.has_lower_quotas() || !inst.lower_groups().is_empty() || sol.open.is_some() {
        let open = match &sol.open {
            Some(o) => o.clone(),
            None => derive_open(inst, &sol.matching),
        };
        ctx.lower_feasibility(&open, &mut out);
    } else {
        ctx.college_quotas(&mut out);
    }
    ctx.set_quotas(&mut out);
    if let Some(t) = &sol.score_limits {
        for e in 0..inst.applications().len() {
            let app = inst.application(e);
            if sol.matching.is_assigned(e, inst) {
                for (j, s) in app.colleges().filter(|&(j, s)| s < t.get(j)) {
                    out.push(Violation {
                        kind: Kind::LimitNotMet,
                        involved: vec![ctx.aid(app.applicant), ctx.cid(j)],
                        explanation: format!(
                            "{} admitted to {} with score {s} below limit {}",
                            ctx.aid(app.applicant),
                            ctx.cid(j),
                            t.get(j)
                        ),
                    });
                }
            }
        }
    }
    let mut report = StabilityReport::new(out);
    if report.verdict == Verdict::Stable {
        report.verdict = Verdict::Feasible;
    }
    Ok(report)
}

fn check_shape(inst: &Instance, sol: &Solution, variant: Variant) -> Result<(), OracleError> {
    let m = &sol.matching;
    if m.assignments().len() != inst.num_applicants() {
        return Err(OracleError::Shape(format!(
            "matching covers {} applicants, instance has {}",
            m.assignments().len(),
            inst.num_applicants()
        )));
    }
    for (i, e) in m.assignments().iter().enumerate() {
        if let Some(&e) = e.as_ref() {
            if e >= inst.applications().len() || inst.application(e).applicant != i {
                return Err(OracleError::Shape(format!(
                    "applicant {} is assigned to an entry outside their list",
                    inst.applicants()[i].id
                )));
            }
        }
    }
    if variant == Variant::ScorelimitsH {
        let Some(t) = &sol.score_limits else {
            return Err(OracleError::Shape("score-limits are required".into()));
        };
        if t.0.len() != inst.num_colleges() {
            return Err(OracleError::Shape("one score-limit per college is required".into()));
        }
        if let Some(j) = (0..t.0.len()).find(|&j| t.0[j] < 0) {
            return Err(OracleError::Shape(format!(
                "score-limit of {} is negative",
                inst.college(j).id
            )));
        }
    }
    if let Some(o) = &sol.open {
        if o.len() != inst.num_colleges() {
            return Err(OracleError::Shape("one open flag per college is required".into()));
        }
    }
    Ok(())
}

struct Ctx<'a> {
    inst: &'a Instance,
    m: &'a Matching,
    intake: Vec<u32>,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a Instance, m: &'a Matching) -> Self {
        Ctx {
            inst,
            m,
            intake: m.intake(inst),
        }
    }

    fn cid(&self, j: usize) -> String {
        self.inst.college(j).id.clone()
    }

    fn aid(&self, i: usize) -> String {
        self.inst.applicants()[i].id.clone()
    }

    /// The applicant behind `e` would rather have `e` than what they hold.
    fn desires(&self, e: usize) -> bool {
        !self.m.weakly_prefers_own(self.inst, e)
    }

    /// College `j` is full and every seat is held with a score above `s`
    /// (at least `s` when `weak`).
    fn protected(&self, j: usize, s: Score, weak: bool) -> bool {
        self.intake[j] >= self.inst.college(j).upper
            && self
                .m
                .admitted_at(self.inst, j)
                .all(|(_, sh)| if weak { sh >= s } else { sh > s })
    }

    fn college_quotas(&self, out: &mut Vec<Violation>) {
        for j in 0..self.inst.num_colleges() {
            let u = self.inst.college(j).upper;
            if self.intake[j] > u {
                out.push(Violation {
                    kind: Kind::QuotaBreach,
                    involved: vec![self.cid(j)],
                    explanation: format!("{} admits {} over quota {u}", self.cid(j), self.intake[j]),
                });
            }
        }
    }

    fn blocking_pairs(&self, out: &mut Vec<Violation>, active: impl Fn(usize) -> bool, weak: bool) {
        for e in 0..self.inst.applications().len() {
            let app = self.inst.application(e);
            let (j, s) = app.single().expect("simple applications");
            if !active(j) || !self.desires(e) || self.protected(j, s, weak) {
                continue;
            }
            out.push(Violation {
                kind: Kind::BlockingPair,
                involved: vec![self.aid(app.applicant), self.cid(j)],
                explanation: self.why_unprotected(app.applicant, j, s, weak),
            });
        }
    }

    fn why_unprotected(&self, i: usize, j: usize, s: Score, weak: bool) -> String {
        if self.intake[j] < self.inst.college(j).upper {
            return format!("{} desires {} which has a free seat", self.aid(i), self.cid(j));
        }
        let (h, sh) = self
            .m
            .admitted_at(self.inst, j)
            .find(|&(_, sh)| if weak { sh < s } else { sh <= s })
            .expect("some seat is held by a weaker applicant");
        format!(
            "{} (score {s}) desires {} which admits {} (score {sh})",
            self.aid(i),
            self.cid(j),
            self.aid(h)
        )
    }

    /// Admissions respect the limits and nobody reaches the limit of a place
    /// they prefer to their own.
    fn limit_consistency(&self, t: &ScoreLimits, out: &mut Vec<Violation>) {
        for e in 0..self.inst.applications().len() {
            let app = self.inst.application(e);
            let (j, s) = app.single().expect("simple applications");
            if self.m.is_assigned(e, self.inst) && s < t.get(j) {
                out.push(Violation {
                    kind: Kind::LimitNotMet,
                    involved: vec![self.aid(app.applicant), self.cid(j)],
                    explanation: format!(
                        "{} admitted to {} with score {s} below limit {}",
                        self.aid(app.applicant),
                        self.cid(j),
                        t.get(j)
                    ),
                });
            }
            if self.desires(e) && s >= t.get(j) {
                out.push(Violation {
                    kind: Kind::BlockingPair,
                    involved: vec![self.aid(app.applicant), self.cid(j)],
                    explanation: format!(
                        "{} reaches limit {} of preferred {} with score {s}",
                        self.aid(app.applicant),
                        t.get(j),
                        self.cid(j)
                    ),
                });
            }
        }
    }

    fn lower_feasibility(&self, open: &[bool], out: &mut Vec<Violation>) {
        let inst = self.inst;
        for j in 0..inst.num_colleges() {
            let c = inst.college(j);
            let n = self.intake[j];
            if open[j] && n > c.upper {
                out.push(Violation {
                    kind: Kind::QuotaBreach,
                    involved: vec![self.cid(j)],
                    explanation: format!("{} admits {n} over quota {}", c.id, c.upper),
                });
            }
            if open[j] && n < c.lower {
                out.push(Violation {
                    kind: Kind::LimitNotMet,
                    involved: vec![self.cid(j)],
                    explanation: format!("open {} admits {n} below lower quota {}", c.id, c.lower),
                });
            }
            if !open[j] && n > 0 {
                out.push(Violation {
                    kind: Kind::LimitNotMet,
                    involved: vec![self.cid(j)],
                    explanation: format!("closed {} admits {n}", c.id),
                });
            }
        }
        for g in inst.lower_groups() {
            let opened = g.members.iter().filter(|&&j| open[j]).count();
            let total: u32 = g.members.iter().map(|&j| self.intake[j]).sum();
            if opened != 0 && opened != g.members.len() {
                out.push(Violation {
                    kind: Kind::LimitNotMet,
                    involved: vec![g.id.clone()],
                    explanation: format!("group {} is only partly open", g.id),
                });
            } else if opened != 0 && total < g.lower {
                out.push(Violation {
                    kind: Kind::LimitNotMet,
                    involved: vec![g.id.clone()],
                    explanation: format!(
                        "open group {} admits {total} below lower quota {}",
                        g.id, g.lower
                    ),
                });
            }
        }
    }

    /// A closed college with at least `l_j` applicants lacking a strictly
    /// better place could open with them.
    fn blocking_groups(&self, open: &[bool], out: &mut Vec<Violation>) {
        let inst = self.inst;
        for j in (0..inst.num_colleges()).filter(|&j| !open[j]) {
            let group: Vec<usize> = inst
                .applications_at(j)
                .iter()
                .copied()
                .filter(|&e| {
                    let app = inst.application(e);
                    !self.m.rank_of(inst, app.applicant).is_some_and(|r| r < app.rank)
                })
                .map(|e| inst.application(e).applicant)
                .collect();
            let l = inst.college(j).lower as usize;
            if group.len() >= l {
                let mut involved = vec![self.cid(j)];
                involved.extend(group.iter().map(|&i| self.aid(i)));
                out.push(Violation {
                    kind: Kind::BlockingGroup,
                    involved,
                    explanation: format!(
                        "closed {} has {} unsatisfied applicants, lower quota {l}",
                        self.cid(j),
                        group.len()
                    ),
                });
            }
        }
    }

    fn set_total(&self, members: &[usize]) -> u32 {
        members.iter().map(|&j| self.intake[j]).sum()
    }

    fn set_quotas(&self, out: &mut Vec<Violation>) {
        for q in self.inst.quota_sets() {
            let total = self.set_total(&q.members);
            if total > q.upper {
                out.push(Violation {
                    kind: Kind::CommonQuotaBreach,
                    involved: vec![q.id.clone()],
                    explanation: format!("set {} admits {total} over common quota {}", q.id, q.upper),
                });
            }
        }
    }

    fn common(&self, out: &mut Vec<Violation>) {
        let inst = self.inst;
        self.set_quotas(out);
        for e in 0..inst.applications().len() {
            let app = inst.application(e);
            let (j, s) = app.single().expect("simple applications");
            if !self.desires(e) || self.protected(j, s, false) {
                continue;
            }
            let covered = inst.quota_sets().iter().any(|q| {
                q.members.contains(&j)
                    && self.set_total(&q.members) >= q.upper
                    && q.members
                        .iter()
                        .all(|&k| self.m.admitted_at(inst, k).all(|(_, sh)| sh > s))
            });
            if !covered {
                out.push(Violation {
                    kind: Kind::BlockingPair,
                    involved: vec![self.aid(app.applicant), self.cid(j)],
                    explanation: format!(
                        "{} (score {s}) desires {} and no set containing it is full of better applicants",
                        self.aid(app.applicant),
                        self.cid(j)
                    ),
                });
            }
        }
    }

    fn paired(&self, out: &mut Vec<Violation>) {
        let inst = self.inst;
        for e in 0..inst.applications().len() {
            if !self.desires(e) {
                continue;
            }
            let app = inst.application(e);
            let protected = app.colleges().any(|(j, s)| self.protected(j, s, false));
            if protected {
                continue;
            }
            let colleges: Vec<String> = app.colleges().map(|(j, _)| self.cid(j)).collect();
            let mut involved = vec![self.aid(app.applicant)];
            involved.extend(colleges.iter().cloned());
            out.push(Violation {
                kind: if app.is_paired() {
                    Kind::PairedBlock
                } else {
                    Kind::BlockingPair
                },
                involved,
                explanation: format!(
                    "{} desires {} and reaches every college involved",
                    self.aid(app.applicant),
                    colleges.join("&")
                ),
            });
        }
    }
}

/// Positive limits that could drop by one without breaking any quota.
fn reducible_limits(inst: &Instance, t: &ScoreLimits, out: &mut Vec<Violation>) {
    for j in 0..inst.num_colleges() {
        if t.get(j) == 0 {
            continue;
        }
        let mut lowered = t.clone();
        lowered.0[j] -= 1;
        let m = lowered.induced_matching(inst, None);
        let intake = m.intake(inst);
        if (0..inst.num_colleges()).all(|k| intake[k] <= inst.college(k).upper) {
            out.push(Violation {
                kind: Kind::ReducibleScoreLimit,
                involved: vec![inst.college(j).id.clone()],
                explanation: format!(
                    "limit of {} can drop from {} to {} within every quota",
                    inst.college(j).id,
                    t.get(j),
                    t.get(j) - 1
                ),
            });
        }
    }
}

/// Open flags implied by a matching: a college (or the lower-quota groups it
/// is linked to) opens when something is admitted or a lower quota is zero.
pub fn derive_open(inst: &Instance, m: &Matching) -> Vec<bool> {
    let intake = m.intake(inst);
    let n = inst.num_colleges();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut j: usize) -> usize {
        while parent[j] != j {
            parent[j] = parent[parent[j]];
            j = parent[j];
        }
        j
    }
    for g in inst.lower_groups() {
        for w in g.members.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut open = vec![false; n];
    for j in 0..n {
        if intake[j] > 0 || inst.college(j).lower == 0 {
            let r = root(&mut parent, j);
            open[r] = true;
        }
    }
    (0..n).map(|j| open[root(&mut parent, j)]).collect()
}

/// Stable solutions found by exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSet {
    pub solutions: Vec<Solution>,
    /// More than `cap` stable solutions exist.
    pub truncated: bool,
}

/// Every stable solution of `variant`, up to `cap`, in a fixed order:
/// matchings by applicant then list position (unmatched first), score-limit
/// vectors lexicographically.
pub fn enumerate_stable(inst: &Instance, variant: Variant, cap: usize) -> Result<StableSet, OracleError> {
    variant.require(inst)?;
    let mut found = Vec::new();
    let mut truncated = false;
    let mut keep = |sol: Solution| -> bool {
        if found.len() == cap {
            truncated = true;
            return false;
        }
        found.push(sol);
        true
    };
    let size = search_space(inst, variant);
    if size > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    if variant == Variant::ScorelimitsH {
        let top = inst.max_score() + 1;
        let mut t = vec![0; inst.num_colleges()];
        'vectors: loop {
            let limits = ScoreLimits(t.clone());
            let sol = Solution::with_limits(limits.induced_matching(inst, None), limits);
            if check(inst, &sol, variant)?.is_stable() && !keep(sol) {
                break;
            }
            for k in (0..t.len()).rev() {
                if t[k] < top {
                    t[k] += 1;
                    continue 'vectors;
                }
                t[k] = 0;
            }
            break;
        }
    } else {
        let mut m = Matching::unmatched(inst.num_applicants());
        let mut intake = vec![0u32; inst.num_colleges()];
        let mut stop = false;
        search(inst, variant, 0, &mut m, &mut intake, &mut |m| {
            let mut sol = Solution::from_matching(m.clone());
            if variant == Variant::Lower {
                sol.open = Some(derive_open(inst, m));
            }
            let stable = check(inst, &sol, variant).map(|r| r.is_stable()).unwrap_or(false);
            if stable && !keep(sol) {
                stop = true;
            }
            !stop
        });
    }
    Ok(StableSet {
        solutions: found,
        truncated,
    })
}

/// Number of candidates [`enumerate_stable`] would visit: score-limit
/// vectors for [`Variant::ScorelimitsH`], applicant choice combinations
/// otherwise. Saturates at `u128::MAX`.
pub fn search_space(inst: &Instance, variant: Variant) -> u128 {
    if variant == Variant::ScorelimitsH {
        let base = (inst.max_score() + 2) as u128;
        base.checked_pow(inst.num_colleges() as u32).unwrap_or(u128::MAX)
    } else {
        (0..inst.num_applicants())
            .map(|i| inst.list(i).len() as u128 + 1)
            .try_fold(1u128, |acc, k| acc.checked_mul(k))
            .unwrap_or(u128::MAX)
    }
}

/// Depth-first over applicant choices, pruning seat overflows.
fn search(
    inst: &Instance,
    variant: Variant,
    i: usize,
    m: &mut Matching,
    intake: &mut Vec<u32>,
    visit: &mut impl FnMut(&Matching) -> bool,
) -> bool {
    if i == inst.num_applicants() {
        return visit(m);
    }
    m.set(i, None);
    if !search(inst, variant, i + 1, m, intake, visit) {
        return false;
    }
    for &e in inst.list(i) {
        let app = inst.application(e);
        if app.colleges().any(|(j, _)| intake[j] >= inst.college(j).upper) {
            continue;
        }
        for (j, _) in app.colleges() {
            intake[j] += 1;
        }
        m.set(i, Some(e));
        let fits = variant != Variant::Common
            || inst
                .quota_sets()
                .iter()
                .all(|q| q.members.iter().map(|&j| intake[j]).sum::<u32>() <= q.upper);
        let go_on = !fits || search(inst, variant, i + 1, m, intake, visit);
        for (j, _) in app.colleges() {
            intake[j] -= 1;
        }
        m.set(i, None);
        if !go_on {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Choice, InstanceBuilder};

    fn i2() -> Instance {
        InstanceBuilder::new(10)
            .college("c1", 1)
            .applicant("a1", &[Choice::single("c1", 7)])
            .applicant("a2", &[Choice::single("c1", 3)])
            .build()
            .unwrap()
    }

    fn i3() -> Instance {
        InstanceBuilder::new(5)
            .college("c1", 1)
            .applicant("a1", &[Choice::single("c1", 5)])
            .applicant("a2", &[Choice::single("c1", 5)])
            .build()
            .unwrap()
    }

    #[test]
    fn classical_verdicts_on_i2() {
        let inst = i2();
        let good = Solution::from_matching(Matching::from_assignments(vec![Some(0), None]));
        assert!(check(&inst, &good, Variant::Classical).unwrap().is_stable());
        let bad = Solution::from_matching(Matching::from_assignments(vec![None, Some(1)]));
        let report = check(&inst, &bad, Variant::Classical).unwrap();
        assert_eq!(report.verdict, Verdict::Unstable);
        assert_eq!(report.violations[0].kind, Kind::BlockingPair);
        assert_eq!(report.violations[0].involved, vec!["a1", "c1"]);
    }

    #[test]
    fn reducible_limit_on_i3() {
        let inst = i3();
        let t = ScoreLimits(vec![7]);
        let sol = Solution::with_limits(t.induced_matching(&inst, None), t);
        let report = check(&inst, &sol, Variant::ScorelimitsH).unwrap();
        assert_eq!(report.verdict, Verdict::Unstable);
        assert_eq!(report.violations[0].kind, Kind::ReducibleScoreLimit);
        assert_eq!(report.violations[0].involved, vec!["c1"]);
    }

    #[test]
    fn enumerations_on_small_fixtures() {
        let single = InstanceBuilder::new(10)
            .college("c1", 1)
            .applicant("a1", &[Choice::single("c1", 5)])
            .build()
            .unwrap();
        assert_eq!(enumerate_stable(&single, Variant::Classical, 10).unwrap().solutions.len(), 1);
        let h = enumerate_stable(&i3(), Variant::ScorelimitsH, 10).unwrap();
        assert_eq!(h.solutions.len(), 1);
        assert_eq!(h.solutions[0].score_limits, Some(ScoreLimits(vec![6])));
        let weak = enumerate_stable(&i3(), Variant::WeakTies, 10).unwrap();
        assert_eq!(weak.solutions.len(), 2);
    }

    #[test]
    fn shape_errors() {
        let inst = i2();
        let sol = Solution::from_matching(Matching::from_assignments(vec![Some(1), None]));
        assert!(matches!(check(&inst, &sol, Variant::Classical), Err(OracleError::Shape(_))));
        let sol = Solution::from_matching(Matching::from_assignments(vec![Some(0), None]));
        assert!(matches!(check(&inst, &sol, Variant::ScorelimitsH), Err(OracleError::Shape(_))));
    }

    #[test]
    fn lower_quota_fixtures() {
        let one = InstanceBuilder::new(10)
            .college_with_lower("c1", 2, 2)
            .applicant("a1", &[Choice::single("c1", 5)])
            .build()
            .unwrap();
        let s = enumerate_stable(&one, Variant::Lower, 10).unwrap();
        assert_eq!(s.solutions.len(), 1);
        assert_eq!(s.solutions[0].matching.size(), 0);
        assert_eq!(s.solutions[0].open, Some(vec![false]));

        let two = InstanceBuilder::new(10)
            .college_with_lower("c1", 2, 2)
            .applicant("a1", &[Choice::single("c1", 5)])
            .applicant("a2", &[Choice::single("c1", 6)])
            .build()
            .unwrap();
        let s = enumerate_stable(&two, Variant::Lower, 10).unwrap();
        assert_eq!(s.solutions.len(), 1);
        assert_eq!(s.solutions[0].matching.size(), 2);
        // Closing with both applicants unsatisfied is a blocking group.
        let closed = Solution {
            open: Some(vec![false]),
            ..Solution::from_matching(Matching::unmatched(2))
        };
        let report = check(&two, &closed, Variant::Lower).unwrap();
        assert_eq!(report.violations[0].kind, Kind::BlockingGroup);
    }

    #[test]
    fn paired_rejection_needs_a_full_college() {
        let inst = InstanceBuilder::new(9)
            .college("c1", 1)
            .college("c2", 1)
            .applicant("A", &[Choice::pair("c1", "c2", 3, 3)])
            .applicant("B", &[Choice::single("c1", 7)])
            .build()
            .unwrap();
        let s = enumerate_stable(&inst, Variant::Paired, 10).unwrap();
        assert_eq!(s.solutions.len(), 1);
        assert_eq!(s.solutions[0].matching.assignments(), &[None, Some(1)]);
    }

    #[test]
    fn oversized_instances_are_refused() {
        let mut b = InstanceBuilder::new(100).college("c1", 1);
        let ids: Vec<String> = (0..40).map(|k| format!("a{k}")).collect();
        for (k, id) in ids.iter().enumerate() {
            b = b.applicant(id, &[Choice::single("c1", k as i64)]);
        }
        let inst = b.build().unwrap();
        assert!(matches!(
            enumerate_stable(&inst, Variant::Classical, 1),
            Err(OracleError::TooLarge { .. })
        ));
    }
}
