//! Fixing colleges that are open, or closed, in every stable solution with
//! lower quotas, found with deferred acceptance on reduced markets.

use std::collections::BTreeSet;

use crate::algorithms::{da_with_closed, Side};
use crate::instance::Instance;
use crate::model::{LinearModel, Role};
use crate::precondition::{PreconditionError, Require};

pub type CollegeSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub open: CollegeSet,
    pub closed: CollegeSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixingResult {
    pub must_open: CollegeSet,
    pub must_close: CollegeSet,
    pub iterations: usize,
    /// The sets known after each round.
    pub trace: Vec<Round>,
}

fn require(inst: &Instance) -> Result<(), PreconditionError> {
    Require(inst).no_paired()?.no_common()?.no_groups()?.no_ties()?;
    Ok(())
}

fn flags(inst: &Instance, closed: impl Fn(usize) -> bool) -> Vec<bool> {
    (0..inst.num_colleges()).map(closed).collect()
}

/// Colleges outside `closed` whose intake reaches the lower quota when the
/// `closed` colleges leave the market and lower quotas are ignored.
pub fn must_open(inst: &Instance, closed: &CollegeSet) -> Result<CollegeSet, PreconditionError> {
    require(inst)?;
    let m = da_with_closed(inst, Side::Applicant, &flags(inst, |j| closed.contains(&j)))?;
    let intake = m.intake(inst);
    Ok((0..inst.num_colleges())
        .filter(|j| !closed.contains(j) && intake[*j] >= inst.college(*j).lower)
        .collect())
}

/// Colleges outside `open_fixed` that miss their lower quota even when every
/// other college outside `open_fixed` is closed.
pub fn must_close(inst: &Instance, open_fixed: &CollegeSet) -> Result<CollegeSet, PreconditionError> {
    require(inst)?;
    let mut out = CollegeSet::new();
    for c in (0..inst.num_colleges()).filter(|j| !open_fixed.contains(j)) {
        let closed = flags(inst, |j| j != c && !open_fixed.contains(&j));
        let m = da_with_closed(inst, Side::Applicant, &closed)?;
        if m.intake(inst)[c] < inst.college(c).lower {
            out.insert(c);
        }
    }
    Ok(out)
}

/// Alternates [`must_open`] and [`must_close`] until one of the two sets
/// stops growing.
pub fn fix_iterate(inst: &Instance) -> Result<FixingResult, PreconditionError> {
    let mut open = must_open(inst, &CollegeSet::new())?;
    let mut closed = must_close(inst, &open)?;
    let mut trace = vec![Round {
        open: open.clone(),
        closed: closed.clone(),
    }];
    loop {
        let next_open: CollegeSet = open.union(&must_open(inst, &closed)?).copied().collect();
        if next_open == open {
            break;
        }
        open = next_open;
        let next_closed: CollegeSet = closed.union(&must_close(inst, &open)?).copied().collect();
        let done = next_closed == closed;
        closed = next_closed;
        trace.push(Round {
            open: open.clone(),
            closed: closed.clone(),
        });
        if done {
            break;
        }
    }
    Ok(FixingResult {
        must_open: open,
        must_close: closed,
        iterations: trace.len(),
        trace,
    })
}

/// Fixes the open indicators of `model` to the result. Returns how many
/// variables were fixed.
pub fn apply_fixings(model: &mut LinearModel, fixing: &FixingResult) -> usize {
    let targets: Vec<_> = model
        .variables()
        .iter()
        .enumerate()
        .filter_map(|(k, v)| match v.role {
            Role::Open(j) if fixing.must_open.contains(&j) => Some((k, 1)),
            Role::Open(j) if fixing.must_close.contains(&j) => Some((k, 0)),
            _ => None,
        })
        .collect();
    for &(k, value) in &targets {
        model.fix(crate::model::VarId(k), value);
    }
    targets.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::build_lower;
    use crate::formulations::fixtures::{i4, i4b};
    use crate::instance::{Choice, InstanceBuilder};
    use crate::solver::enumerate_feasible;

    fn set(items: &[usize]) -> CollegeSet {
        items.iter().copied().collect()
    }

    #[test]
    fn single_applicant_cannot_open_a_two_seat_minimum() {
        assert_eq!(must_open(&i4(), &set(&[])).unwrap(), set(&[]));
        assert_eq!(must_close(&i4(), &set(&[])).unwrap(), set(&[0]));
        let r = fix_iterate(&i4()).unwrap();
        assert_eq!(r.must_close, set(&[0]));
        assert!(r.must_open.is_empty());
    }

    #[test]
    fn two_applicants_open_it() {
        assert_eq!(must_open(&i4b(), &set(&[])).unwrap(), set(&[0]));
        assert_eq!(must_close(&i4b(), &set(&[0])).unwrap(), set(&[]));
    }

    #[test]
    fn zero_lower_quotas_open_everything_in_one_round() {
        let inst = InstanceBuilder::new(9)
            .college("c1", 1)
            .college("c2", 1)
            .applicant("a1", &[Choice::single("c1", 3), Choice::single("c2", 4)])
            .build()
            .unwrap();
        let r = fix_iterate(&inst).unwrap();
        assert_eq!(r.must_open, set(&[0, 1]));
        assert!(r.must_close.is_empty());
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn fixing_keeps_the_feasible_matchings() {
        let inst = i4b();
        let mut model = build_lower(&inst, false).unwrap();
        let vars = model.vars_where(|r| matches!(r, Role::Assign(_)));
        let before = enumerate_feasible(&model, &vars, 100).unwrap().items;
        let fixed = apply_fixings(&mut model, &fix_iterate(&inst).unwrap());
        assert_eq!(fixed, 1);
        assert_eq!(enumerate_feasible(&model, &vars, 100).unwrap().items, before);
    }

    #[test]
    fn ties_are_rejected() {
        let inst = InstanceBuilder::new(9)
            .college_with_lower("c1", 2, 1)
            .applicant("a1", &[Choice::single("c1", 3)])
            .applicant("a2", &[Choice::single("c1", 3)])
            .build()
            .unwrap();
        assert!(fix_iterate(&inst).is_err());
    }
}
