//! Matchings and score-limit vectors shared by algorithms, models and the oracle.

use crate::instance::{Instance, Score};

/// Per-applicant assignment, stored as the index of the accepted application
/// (simple or paired) or `None` when unmatched.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assigned: Vec<Option<usize>>,
}

impl Matching {
    pub fn unmatched(applicants: usize) -> Self {
        Matching {
            assigned: vec![None; applicants],
        }
    }

    pub fn from_assignments(assigned: Vec<Option<usize>>) -> Self {
        Matching { assigned }
    }

    pub fn assignments(&self) -> &[Option<usize>] {
        &self.assigned
    }

    pub fn get(&self, applicant: usize) -> Option<usize> {
        self.assigned[applicant]
    }

    pub fn set(&mut self, applicant: usize, application: Option<usize>) {
        self.assigned[applicant] = application;
    }

    pub fn size(&self) -> usize {
        self.assigned.iter().flatten().count()
    }

    pub fn is_assigned(&self, application: usize, inst: &Instance) -> bool {
        self.assigned[inst.application(application).applicant] == Some(application)
    }

    /// Seats used at each college; a paired admission uses one seat at both.
    pub fn intake(&self, inst: &Instance) -> Vec<u32> {
        let mut intake = vec![0; inst.num_colleges()];
        for &e in self.assigned.iter().flatten() {
            for (c, _) in inst.application(e).colleges() {
                intake[c] += 1;
            }
        }
        intake
    }

    /// `(applicant, score)` of everyone holding a seat at college `j`.
    pub fn admitted_at<'a>(
        &'a self,
        inst: &'a Instance,
        j: usize,
    ) -> impl Iterator<Item = (usize, Score)> + 'a {
        inst.applications_at(j)
            .iter()
            .filter(move |&&e| self.is_assigned(e, inst))
            .map(move |&e| {
                let app = inst.application(e);
                (app.applicant, app.score_at(j).expect("application involves college"))
            })
    }

    /// Rank of the applicant's assignment, if matched.
    pub fn rank_of(&self, inst: &Instance, applicant: usize) -> Option<u32> {
        self.assigned[applicant].map(|e| inst.application(e).rank)
    }

    /// True if the applicant holds `application` or something they rank higher.
    pub fn weakly_prefers_own(&self, inst: &Instance, application: usize) -> bool {
        let app = inst.application(application);
        self.rank_of(inst, app.applicant)
            .is_some_and(|r| r <= app.rank)
    }

    /// Total rank of all assignments (the classical rank-sum objective).
    pub fn rank_sum(&self, inst: &Instance) -> i64 {
        self.assigned
            .iter()
            .flatten()
            .map(|&e| i64::from(inst.application(e).rank))
            .sum()
    }

    /// `(applicant id, target label)` rows for display.
    pub fn describe(&self, inst: &Instance) -> Vec<(String, Option<String>)> {
        self.assigned
            .iter()
            .enumerate()
            .map(|(i, e)| {
                (
                    inst.applicants()[i].id.clone(),
                    e.map(|e| inst.target_label(e)),
                )
            })
            .collect()
    }
}

/// Per-college score-limits `t_j`, each in `0..=max_score + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScoreLimits(pub Vec<Score>);

impl ScoreLimits {
    pub fn zeros(colleges: usize) -> Self {
        ScoreLimits(vec![0; colleges])
    }

    pub fn get(&self, j: usize) -> Score {
        self.0[j]
    }

    /// Admits each applicant to the first entry of their list whose every college
    /// limit they reach. Colleges flagged in `closed` admit nobody.
    pub fn induced_matching(&self, inst: &Instance, closed: Option<&[bool]>) -> Matching {
        let mut m = Matching::unmatched(inst.num_applicants());
        for i in 0..inst.num_applicants() {
            let first = inst.list(i).iter().copied().find(|&e| {
                inst.application(e).colleges().all(|(c, s)| {
                    s >= self.0[c] && !closed.is_some_and(|cl| cl[c])
                })
            });
            m.set(i, first);
        }
        m
    }

    /// Pointwise `<=`.
    pub fn dominated_by(&self, other: &ScoreLimits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}
