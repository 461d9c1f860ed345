//! Integer linear models: bounded integer variables, integer-coefficient
//! linear constraints tagged with the stability condition they encode, and an
//! optional (lexicographic) list of objectives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// What a variable means in terms of the admissions instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// `x_e`: application `e` is accepted.
    Assign(usize),
    /// `t_j`: score-limit of college `j`.
    Limit(usize),
    /// `f_j`: college `j` is filled.
    Filled(usize),
    /// `y_j`: score-limit of college `j` is positive.
    Positive(usize),
    /// `d_e`: applicant behind `e` desires and would deserve the college after a unit decrease.
    Desire(usize),
    /// `o_j`: college `j` is open.
    Open(usize),
    /// `o_p`: lower-quota group `p` is open.
    GroupOpen(usize),
    /// `t_p`: score-limit of common quota set `p`.
    SetLimit(usize),
    /// `f_p`: common quota set `p` is filled.
    SetFilled(usize),
    /// `y_i^p` for an explicit quota set.
    SetException { applicant: usize, set: usize },
    /// `y_i^p` for the implicit singleton set of a college.
    SingletonException { applicant: usize, college: usize },
    /// `y_i^(jk)`: which college of a rejected pair carries the rejection.
    PairException(usize),
    Other,
}

/// The stability or feasibility condition a constraint belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    ApplicantFeasible,
    CollegeFeasible,
    Stable,
    StableTies,
    LimitAdmitted,
    LimitRejected,
    FilledIndicator,
    UnfilledLimit,
    PositiveLimit,
    Desires,
    Deserves,
    LimitIrreducible,
    LowerFeasible,
    LowerOpenStable,
    LowerGroupStable,
    GroupOpening,
    GroupLowerFeasible,
    CommonFeasible,
    CommonLimitAdmitted,
    CommonLimitRejected,
    CommonException,
    CommonFilledIndicator,
    CommonUnfilledLimit,
    PairedApplicantFeasible,
    PairedCollegeFeasible,
    SimpleLimitAdmitted,
    SimpleLimitRejected,
    PairLimitAdmittedFirst,
    PairLimitAdmittedSecond,
    PairLimitRejectedFirst,
    PairLimitRejectedSecond,
    PairedFilledIndicator,
    PairedUnfilledLimit,
    LowerLimitRejected,
    CommonLowerLimitRejected,
    /// Added by callers (fixings, objective cuts), not by a formulation.
    Auxiliary,
}

impl Tag {
    pub fn label(self) -> &'static str {
        use Tag::*;
        match self {
            ApplicantFeasible => "applicant_feasible",
            CollegeFeasible => "college_feasible",
            Stable => "stable",
            StableTies => "stable_ties",
            LimitAdmitted => "score_stable_college",
            LimitRejected => "score_stable_applicant",
            FilledIndicator => "score_stable_filled1",
            UnfilledLimit => "score_stable_filled2",
            PositiveLimit => "zero",
            Desires => "desires",
            Deserves => "deserves",
            LimitIrreducible => "stable_with_no_obj",
            LowerFeasible => "lower_feasible",
            LowerOpenStable => "lower_stable1",
            LowerGroupStable => "lower_stable2",
            GroupOpening => "common_lower_feasible",
            GroupLowerFeasible => "lower_feasible_set",
            CommonFeasible => "common_college_feasible",
            CommonLimitAdmitted => "common_score_stable_college",
            CommonLimitRejected => "common_score_stable_applicant",
            CommonException => "common_score_stable_exception",
            CommonFilledIndicator => "common_score_stable_filled1",
            CommonUnfilledLimit => "common_score_stable_filled2",
            PairedApplicantFeasible => "paired_applicant_feasible",
            PairedCollegeFeasible => "paired_college_feasible",
            SimpleLimitAdmitted => "simple_score_stable_college",
            SimpleLimitRejected => "simple_score_stable_applicant",
            PairLimitAdmittedFirst => "paired_score_stable_college1",
            PairLimitAdmittedSecond => "paired_score_stable_college2",
            PairLimitRejectedFirst => "paired_score_stable_applicant1",
            PairLimitRejectedSecond => "paired_score_stable_applicant2",
            PairedFilledIndicator => "paired_score_stable_filled1",
            PairedUnfilledLimit => "paired_score_stable_filled2",
            LowerLimitRejected => "lower_score_stable_applicant",
            CommonLowerLimitRejected => "common_lower_score_stable_applicant",
            Auxiliary => "auxiliary",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `sum(coef * var) + constant`. Terms are merged lazily by [`LinExpr::normalized`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinExpr {
    terms: Vec<(VarId, i64)>,
    constant: i64,
}

impl LinExpr {
    pub fn constant(c: i64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(var: VarId, coef: i64) -> Self {
        LinExpr {
            terms: vec![(var, coef)],
            constant: 0,
        }
    }

    pub fn sum(vars: impl IntoIterator<Item = VarId>) -> Self {
        LinExpr {
            terms: vars.into_iter().map(|v| (v, 1)).collect(),
            constant: 0,
        }
    }

    pub fn add_term(&mut self, var: VarId, coef: i64) {
        self.terms.push((var, coef));
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    /// Merged, sorted, zero-free terms and the constant.
    pub fn normalized(&self) -> (Vec<(VarId, i64)>, i64) {
        let mut merged: BTreeMap<VarId, i64> = BTreeMap::new();
        for &(v, c) in &self.terms {
            let slot = merged.entry(v).or_insert(0);
            *slot = slot.checked_add(c).expect("coefficient overflow");
        }
        (
            merged.into_iter().filter(|&(_, c)| c != 0).collect(),
            self.constant,
        )
    }

    pub fn evaluate(&self, values: &[i64]) -> i64 {
        self.terms
            .iter()
            .map(|&(v, c)| c * values[v.0])
            .sum::<i64>()
            + self.constant
    }
}

impl From<VarId> for LinExpr {
    fn from(v: VarId) -> Self {
        LinExpr::term(v, 1)
    }
}

impl From<i64> for LinExpr {
    fn from(c: i64) -> Self {
        LinExpr::constant(c)
    }
}

impl<T: Into<LinExpr>> Add<T> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: T) -> LinExpr {
        let rhs = rhs.into();
        self.terms.extend(rhs.terms);
        self.constant = self.constant.checked_add(rhs.constant).expect("constant overflow");
        self
    }
}

impl<T: Into<LinExpr>> Sub<T> for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: T) -> LinExpr {
        self + (-rhs.into())
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1
    }
}

impl Mul<i64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, k: i64) -> LinExpr {
        for t in &mut self.terms {
            t.1 = t.1.checked_mul(k).expect("coefficient overflow");
        }
        self.constant = self.constant.checked_mul(k).expect("constant overflow");
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
    pub role: Role,
}

impl Variable {
    pub fn is_binary(&self) -> bool {
        self.lower == 0 && self.upper == 1
    }
}

/// `sum(terms) relation rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub tag: Tag,
    pub terms: Vec<(VarId, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl Constraint {
    pub fn activity(&self, values: &[i64]) -> i64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        self.relation.holds(self.activity(values), self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub label: String,
    pub sense: Sense,
    pub terms: Vec<(VarId, i64)>,
    pub constant: i64,
}

impl Objective {
    pub fn new(label: &str, sense: Sense, expr: LinExpr) -> Self {
        let (terms, constant) = expr.normalized();
        Objective {
            label: label.to_string(),
            sense,
            terms,
            constant,
        }
    }

    pub fn evaluate(&self, values: &[i64]) -> i64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum::<i64>() + self.constant
    }

    /// True if `a` is strictly better than `b` under this objective's sense.
    pub fn better(&self, a: i64, b: i64) -> bool {
        match self.sense {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

/// Why an assignment does not satisfy a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("assignment has {got} values, model has {expected} variables")]
    Length { expected: usize, got: usize },
    #[error("variable {name} = {value} outside [{lower}, {upper}]")]
    Bound {
        name: String,
        value: i64,
        lower: i64,
        upper: i64,
    },
    #[error("constraint violated: {name}")]
    Constraint { name: String, tag: Tag },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objectives: Vec<Objective>,
}

impl LinearModel {
    pub fn new(name: &str) -> Self {
        LinearModel {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: i64, upper: i64, role: Role) -> VarId {
        assert!(lower <= upper, "empty domain");
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
            role,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, role: Role) -> VarId {
        self.add_var(name, 0, 1, role)
    }

    /// Adds `lhs relation rhs`; both sides may carry variables and constants.
    pub fn constrain(
        &mut self,
        name: impl Into<String>,
        tag: Tag,
        lhs: impl Into<LinExpr>,
        relation: Relation,
        rhs: impl Into<LinExpr>,
    ) {
        let (terms, constant) = (lhs.into() - rhs.into()).normalized();
        for &(v, _) in &terms {
            assert!(v.0 < self.variables.len(), "undeclared variable {v:?}");
        }
        self.constraints.push(Constraint {
            name: name.into(),
            tag,
            terms,
            relation,
            rhs: -constant,
        });
    }

    pub fn set_objective(&mut self, objective: Objective) {
        self.objectives = vec![objective];
    }

    pub fn set_objectives(&mut self, objectives: Vec<Objective>) {
        self.objectives = objectives;
    }

    pub fn clear_objectives(&mut self) {
        self.objectives.clear();
    }

    /// Restricts a variable to a single value.
    pub fn fix(&mut self, var: VarId, value: i64) {
        let v = &mut self.variables[var.0];
        v.lower = value;
        v.upper = value;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.variables[var.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn find(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn find_role(&self, role: Role) -> Option<VarId> {
        self.variables.iter().position(|v| v.role == role).map(VarId)
    }

    pub fn vars_where(&self, pred: impl Fn(Role) -> bool) -> Vec<VarId> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| pred(v.role))
            .map(|(i, _)| VarId(i))
            .collect()
    }

    pub fn tags(&self) -> BTreeSet<Tag> {
        self.constraints.iter().map(|c| c.tag).collect()
    }

    /// Checks bounds, then every constraint in order.
    pub fn check(&self, values: &[i64]) -> Result<(), Violation> {
        if values.len() != self.variables.len() {
            return Err(Violation::Length {
                expected: self.variables.len(),
                got: values.len(),
            });
        }
        for (v, &x) in self.variables.iter().zip(values) {
            if x < v.lower || x > v.upper {
                return Err(Violation::Bound {
                    name: v.name.clone(),
                    value: x,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        for c in &self.constraints {
            if !c.is_satisfied(values) {
                return Err(Violation::Constraint {
                    name: c.name.clone(),
                    tag: c.tag,
                });
            }
        }
        Ok(())
    }

    /// CPLEX-LP style text; each constraint carries its tag as a comment.
    /// Only the first objective of a lexicographic list is emitted as such.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ model: {}", self.name);
        let fmt_terms = |terms: &[(VarId, i64)]| -> String {
            if terms.is_empty() {
                return "0 ".to_string() + &self.variables.first().map_or(String::new(), |v| v.name.clone());
            }
            let mut s = String::new();
            for (k, &(v, c)) in terms.iter().enumerate() {
                let name = &self.variables[v.0].name;
                let sign = if c < 0 { "-" } else if k > 0 { "+" } else { "" };
                if k > 0 {
                    s.push(' ');
                }
                s.push_str(sign);
                if k > 0 || c < 0 {
                    s.push(' ');
                }
                if c.abs() != 1 {
                    let _ = write!(s, "{} ", c.abs());
                }
                s.push_str(name);
            }
            s
        };
        match self.objectives.first() {
            Some(obj) => {
                let sense = match obj.sense {
                    Sense::Minimize => "Minimize",
                    Sense::Maximize => "Maximize",
                };
                let _ = writeln!(out, "{sense}\n obj: {}", fmt_terms(&obj.terms));
                for (k, later) in self.objectives.iter().enumerate().skip(1) {
                    let _ = writeln!(
                        out,
                        "\\ lexicographic objective {}: {:?} {}",
                        k + 1,
                        later.sense,
                        fmt_terms(&later.terms)
                    );
                }
            }
            None => {
                let _ = writeln!(out, "Minimize\n obj:");
            }
        }
        let _ = writeln!(out, "Subject To");
        for c in &self.constraints {
            let _ = writeln!(
                out,
                " {}: {} {} {} \\ {}",
                c.name,
                fmt_terms(&c.terms),
                c.relation.symbol(),
                c.rhs,
                c.tag
            );
        }
        let _ = writeln!(out, "Bounds");
        for v in self.variables.iter().filter(|v| !v.is_binary()) {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
        let generals: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| !v.is_binary())
            .map(|v| v.name.as_str())
            .collect();
        if !generals.is_empty() {
            let _ = writeln!(out, "Generals\n {}", generals.join(" "));
        }
        let binaries: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.is_binary())
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            let _ = writeln!(out, "Binaries\n {}", binaries.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constrain_moves_everything_left() {
        let mut m = LinearModel::new("t");
        let x = m.add_binary("x", Role::Other);
        let t = m.add_var("t", 0, 6, Role::Other);
        // t <= (1 - x) * 6 + 5   ==>   t + 6x <= 11
        m.constrain("c", Tag::Auxiliary, t, Relation::Le, (LinExpr::constant(1) - x) * 6 + 5);
        let c = &m.constraints()[0];
        assert_eq!(c.terms, vec![(x, 6), (t, 1)]);
        assert_eq!(c.rhs, 11);
    }

    #[test]
    fn repeated_terms_merge() {
        let mut m = LinearModel::new("t");
        let x = m.add_binary("x", Role::Other);
        m.constrain(
            "c",
            Tag::Auxiliary,
            LinExpr::term(x, 3) + x,
            Relation::Ge,
            LinExpr::term(x, 4),
        );
        assert!(m.constraints()[0].terms.is_empty());
    }

    #[test]
    fn check_names_violated_constraint() {
        let mut m = LinearModel::new("t");
        let x = m.add_binary("x", Role::Other);
        let y = m.add_binary("y", Role::Other);
        m.constrain("college_feasible(c1)", Tag::CollegeFeasible, LinExpr::sum([x, y]), Relation::Le, 1);
        assert!(m.check(&[1, 0]).is_ok());
        let err = m.check(&[1, 1]).unwrap_err();
        assert_eq!(err.to_string(), "constraint violated: college_feasible(c1)");
        assert!(matches!(m.check(&[2, 0]), Err(Violation::Bound { .. })));
        assert!(matches!(m.check(&[0]), Err(Violation::Length { .. })));
    }

    #[test]
    fn lp_dump_has_one_line_per_constraint() {
        let mut m = LinearModel::new("demo");
        let x = m.add_binary("x(a1,c1)", Role::Assign(0));
        let t = m.add_var("t(c1)", 0, 6, Role::Limit(0));
        m.constrain("score_stable_college(a1,c1)", Tag::LimitAdmitted, t, Relation::Le, (LinExpr::constant(1) - x) * 6 + 5);
        m.set_objective(Objective::new("limits", Sense::Minimize, t.into()));
        let lp = m.to_lp();
        assert!(lp.contains("Minimize\n obj: t(c1)"), "{lp}");
        assert!(lp.contains(" score_stable_college(a1,c1): 6 x(a1,c1) + t(c1) <= 11 \\ score_stable_college"), "{lp}");
        assert!(lp.contains(" 0 <= t(c1) <= 6"));
        assert!(lp.contains("Binaries\n x(a1,c1)"));
        assert!(lp.ends_with("End\n"));
    }
}
