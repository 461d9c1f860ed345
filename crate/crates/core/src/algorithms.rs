//! Deferred acceptance, its score-limit generalization for ties, and the
//! college-closing heuristic for lower quotas.

use std::collections::VecDeque;

use crate::instance::{Instance, Score};
use crate::matching::{Matching, ScoreLimits};
use crate::precondition::{PreconditionError, Require};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Applicants propose: applicant-optimal outcome.
    Applicant,
    /// Colleges propose: applicant-pessimal outcome.
    College,
}

/// Deferred acceptance on a strict instance. Lower quotas are ignored.
pub fn da(inst: &Instance, side: Side) -> Result<Matching, PreconditionError> {
    da_with_closed(inst, side, &vec![false; inst.num_colleges()])
}

/// Deferred acceptance with the flagged colleges removed from the market.
pub fn da_with_closed(
    inst: &Instance,
    side: Side,
    closed: &[bool],
) -> Result<Matching, PreconditionError> {
    Require(inst).no_paired()?.no_common()?.no_ties()?;
    Ok(match side {
        Side::Applicant => {
            let mut p = Proposals::new(inst, closed);
            p.run();
            p.matching()
        }
        Side::College => college_proposing(inst, closed),
    })
}

/// Applicant-proposing state that can be resumed after closing a college.
struct Proposals<'a> {
    inst: &'a Instance,
    closed: Vec<bool>,
    /// Position in each applicant's list of the next entry to try.
    next: Vec<usize>,
    /// Application indices tentatively held at each college.
    held: Vec<Vec<usize>>,
    free: VecDeque<usize>,
}

impl<'a> Proposals<'a> {
    fn new(inst: &'a Instance, closed: &[bool]) -> Self {
        Proposals {
            inst,
            closed: closed.to_vec(),
            next: vec![0; inst.num_applicants()],
            held: vec![Vec::new(); inst.num_colleges()],
            free: (0..inst.num_applicants()).collect(),
        }
    }

    fn run(&mut self) {
        let inst = self.inst;
        while let Some(i) = self.free.pop_front() {
            let list = inst.list(i);
            while self.next[i] < list.len() {
                let e = list[self.next[i]];
                self.next[i] += 1;
                let (j, _) = inst.application(e).single().expect("simple applications");
                if self.closed[j] {
                    continue;
                }
                self.held[j].push(e);
                if self.held[j].len() > inst.college(j).upper as usize {
                    let worst = (0..self.held[j].len())
                        .min_by_key(|&k| score(inst, self.held[j][k]))
                        .expect("non-empty");
                    let rejected = self.held[j].swap_remove(worst);
                    let r = inst.application(rejected).applicant;
                    if r != i {
                        self.free.push_back(r);
                        break;
                    }
                    continue;
                }
                break;
            }
        }
    }

    /// Closes `j` and lets its applicants continue down their lists.
    fn close(&mut self, j: usize) {
        self.closed[j] = true;
        for e in self.held[j].drain(..) {
            self.free.push_back(self.inst.application(e).applicant);
        }
        self.run();
    }

    fn matching(&self) -> Matching {
        let mut m = Matching::unmatched(self.inst.num_applicants());
        for held in &self.held {
            for &e in held {
                m.set(self.inst.application(e).applicant, Some(e));
            }
        }
        m
    }
}

fn score(inst: &Instance, e: usize) -> Score {
    inst.application(e).single().expect("simple applications").1
}

fn college_proposing(inst: &Instance, closed: &[bool]) -> Matching {
    // Each college offers seats in decreasing score order.
    let order: Vec<Vec<usize>> = (0..inst.num_colleges())
        .map(|j| {
            let mut apps = inst.applications_at(j).to_vec();
            apps.sort_by_key(|&e| std::cmp::Reverse(score(inst, e)));
            apps
        })
        .collect();
    let mut next = vec![0usize; inst.num_colleges()];
    let mut held = vec![0u32; inst.num_colleges()];
    let mut m = Matching::unmatched(inst.num_applicants());
    let mut active: VecDeque<usize> = (0..inst.num_colleges()).filter(|&j| !closed[j]).collect();
    while let Some(j) = active.pop_front() {
        while held[j] < inst.college(j).upper && next[j] < order[j].len() {
            let e = order[j][next[j]];
            next[j] += 1;
            let i = inst.application(e).applicant;
            let rank = inst.application(e).rank;
            match m.get(i) {
                Some(cur) if inst.application(cur).rank <= rank => {}
                cur => {
                    if let Some(cur) = cur {
                        let (k, _) = inst.application(cur).single().expect("simple");
                        held[k] -= 1;
                        active.push_back(k);
                    }
                    m.set(i, Some(e));
                    held[j] += 1;
                }
            }
        }
    }
    m
}

/// Score-limits under ties: applicants are admitted to the first place whose
/// limit they reach, and a tie group that would overflow a quota is rejected
/// as a whole. The applicant side gives the pointwise minimal stable limits,
/// the college side the pointwise maximal ones.
pub fn gs_scorelimits(
    inst: &Instance,
    side: Side,
) -> Result<(Matching, ScoreLimits), PreconditionError> {
    Require(inst).no_paired()?.no_common()?;
    let limits = match side {
        Side::Applicant => raise_limits(inst),
        Side::College => lower_limits(inst),
    };
    Ok((limits.induced_matching(inst, None), limits))
}

/// Smallest limit at `j` keeping at most `u_j` of `scores` at or above it.
fn smallest_fitting(scores: &mut [Score], upper: u32, current: Score) -> Score {
    let u = upper as usize;
    if scores.len() <= u {
        return current;
    }
    scores.sort_unstable_by(|a, b| b.cmp(a));
    // Everyone scoring at least scores[u] would overflow, so the limit must exceed it.
    (scores[u] + 1).max(current)
}

fn raise_limits(inst: &Instance) -> ScoreLimits {
    let mut t = ScoreLimits::zeros(inst.num_colleges());
    loop {
        let m = t.induced_matching(inst, None);
        let mut changed = false;
        for j in 0..inst.num_colleges() {
            let mut scores: Vec<Score> = m.admitted_at(inst, j).map(|(_, s)| s).collect();
            let v = smallest_fitting(&mut scores, inst.college(j).upper, t.0[j]);
            if v != t.0[j] {
                t.0[j] = v;
                changed = true;
            }
        }
        if !changed {
            return t;
        }
    }
}

fn lower_limits(inst: &Instance) -> ScoreLimits {
    let top = inst.max_score() + 1;
    let mut t = ScoreLimits(vec![top; inst.num_colleges()]);
    loop {
        let mut changed = false;
        for j in 0..inst.num_colleges() {
            // Scores of applicants who would take `j` if its limit were 0.
            let mut probe = t.clone();
            probe.0[j] = 0;
            let m = probe.induced_matching(inst, None);
            let mut scores: Vec<Score> = m.admitted_at(inst, j).map(|(_, s)| s).collect();
            let v = smallest_fitting(&mut scores, inst.college(j).upper, 0);
            if v < t.0[j] {
                t.0[j] = v;
                changed = true;
            }
        }
        if !changed {
            return t;
        }
    }
}

/// One closure made by the heuristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureStep {
    pub college: usize,
    pub admitted: u32,
    pub lower: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicOutcome {
    pub matching: Matching,
    pub closed: Vec<bool>,
    pub trace: Vec<ClosureStep>,
}

/// Applicant-proposing deferred acceptance that, while some open college
/// misses its lower quota, closes the one with the smallest admitted/lower
/// ratio (then fewest admitted, then lowest index) and lets its applicants
/// continue proposing.
pub fn lower_quota_heuristic(inst: &Instance) -> Result<HeuristicOutcome, PreconditionError> {
    Require(inst).no_paired()?.no_common()?.no_ties()?;
    let mut p = Proposals::new(inst, &vec![false; inst.num_colleges()]);
    p.run();
    let mut trace = Vec::new();
    loop {
        let short = (0..inst.num_colleges())
            .filter(|&j| !p.closed[j] && (p.held[j].len() as u32) < inst.college(j).lower)
            .min_by(|&a, &b| {
                let (na, la) = (p.held[a].len() as u64, u64::from(inst.college(a).lower));
                let (nb, lb) = (p.held[b].len() as u64, u64::from(inst.college(b).lower));
                (na * lb).cmp(&(nb * la)).then(na.cmp(&nb)).then(a.cmp(&b))
            });
        let Some(j) = short else { break };
        trace.push(ClosureStep {
            college: j,
            admitted: p.held[j].len() as u32,
            lower: inst.college(j).lower,
        });
        p.close(j);
    }
    Ok(HeuristicOutcome {
        matching: p.matching(),
        closed: p.closed.clone(),
        trace,
    })
}
