//! Problem data: applicants, colleges, ranked and scored applications, common
//! upper-quota sets and lower-quota groups.
//!
//! An [`Instance`] is validated once at construction and is immutable
//! afterwards. Applicants and colleges are addressed by their position
//! (`usize`) everywhere in the crate; string identifiers only matter for I/O.

mod builder;
mod format;
mod generate;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

pub use builder::{Choice, InstanceBuilder};
pub use format::{parse_instance, to_json};
pub use generate::{generate, GenConfig, GenError, Topology};

/// Scores and score-limits are integral.
pub type Score = i64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applicant {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct College {
    pub id: String,
    pub upper: u32,
    pub lower: u32,
}

/// What a list entry asks for: one college, or two distinct colleges at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Single { college: usize, score: Score },
    Pair { colleges: [usize; 2], scores: [Score; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Application {
    pub applicant: usize,
    /// Position in the applicant's list, 1 = most preferred.
    pub rank: u32,
    pub target: Target,
}

impl Application {
    /// `(college, score)` pairs touched by this application.
    pub fn colleges(&self) -> impl Iterator<Item = (usize, Score)> + '_ {
        let (first, second) = match self.target {
            Target::Single { college, score } => ((college, score), None),
            Target::Pair { colleges, scores } => {
                ((colleges[0], scores[0]), Some((colleges[1], scores[1])))
            }
        };
        std::iter::once(first).chain(second)
    }

    pub fn involves(&self, college: usize) -> bool {
        self.colleges().any(|(c, _)| c == college)
    }

    pub fn score_at(&self, college: usize) -> Option<Score> {
        self.colleges().find(|&(c, _)| c == college).map(|(_, s)| s)
    }

    pub fn is_paired(&self) -> bool {
        matches!(self.target, Target::Pair { .. })
    }

    /// The single college of a simple application.
    pub fn single(&self) -> Option<(usize, Score)> {
        match self.target {
            Target::Single { college, score } => Some((college, score)),
            Target::Pair { .. } => None,
        }
    }
}

/// A set of colleges sharing a common upper quota.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotaSet {
    pub id: String,
    pub members: Vec<usize>,
    pub upper: u32,
}

/// A set of colleges sharing a common lower quota; opened or closed together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerGroup {
    pub id: String,
    pub members: Vec<usize>,
    pub lower: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("max_score must be non-negative, got {0}")]
    NegativeMaxScore(Score),
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("unknown college {id:?} referenced by {context}")]
    UnknownCollege { id: String, context: String },
    #[error("duplicate rank {rank} for applicant {applicant}")]
    DuplicateRank { applicant: String, rank: u32 },
    #[error("rank must be positive (applicant {applicant})")]
    ZeroRank { applicant: String },
    #[error("applicant {applicant} lists the same target twice")]
    DuplicateTarget { applicant: String },
    #[error("score {score} of applicant {applicant} at college {college} is outside 0..={max}")]
    ScoreOutOfRange {
        applicant: String,
        college: String,
        score: Score,
        max: Score,
    },
    #[error("applicant {applicant} has differing scores at college {college}")]
    InconsistentScore { applicant: String, college: String },
    #[error("paired application of applicant {applicant} names college {college} twice")]
    PairNotDistinct { applicant: String, college: String },
    #[error("college {college}: upper quota must be at least 1")]
    ZeroUpper { college: String },
    #[error("college {college}: lower quota {lower} exceeds upper quota {upper}")]
    LowerAboveUpper {
        college: String,
        lower: u32,
        upper: u32,
    },
    #[error("{kind} {id} has no members")]
    EmptySet { kind: &'static str, id: String },
    #[error("{kind} {id} lists college {college} twice")]
    DuplicateMember {
        kind: &'static str,
        id: String,
        college: String,
    },
    #[error("lower group {id}: lower quota must be at least 1")]
    ZeroGroupLower { id: String },
    #[error("unequal scores inside quota set {set}: applicant {applicant} has {first} and {second}")]
    UnequalScoresInSet {
        set: String,
        applicant: String,
        first: Score,
        second: Score,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    max_score: Score,
    applicants: Vec<Applicant>,
    colleges: Vec<College>,
    applications: Vec<Application>,
    quota_sets: Vec<QuotaSet>,
    lower_groups: Vec<LowerGroup>,
    // Derived, filled by `new`.
    lists: Vec<Vec<usize>>,
    at_college: Vec<Vec<usize>>,
}

impl Instance {
    pub fn new(
        max_score: Score,
        applicants: Vec<Applicant>,
        colleges: Vec<College>,
        applications: Vec<Application>,
        quota_sets: Vec<QuotaSet>,
        lower_groups: Vec<LowerGroup>,
    ) -> Result<Self, InstanceError> {
        let mut inst = Instance {
            max_score,
            applicants,
            colleges,
            applications,
            quota_sets,
            lower_groups,
            lists: Vec::new(),
            at_college: Vec::new(),
        };
        inst.validate()?;
        inst.index();
        Ok(inst)
    }

    fn index(&mut self) {
        let mut lists = vec![Vec::new(); self.applicants.len()];
        let mut at_college = vec![Vec::new(); self.colleges.len()];
        for (e, app) in self.applications.iter().enumerate() {
            lists[app.applicant].push(e);
            for (c, _) in app.colleges() {
                at_college[c].push(e);
            }
        }
        for list in &mut lists {
            list.sort_by_key(|&e| self.applications[e].rank);
        }
        self.lists = lists;
        self.at_college = at_college;
    }

    fn validate(&self) -> Result<(), InstanceError> {
        if self.max_score < 0 {
            return Err(InstanceError::NegativeMaxScore(self.max_score));
        }
        unique_ids("applicant", self.applicants.iter().map(|a| &a.id))?;
        unique_ids("college", self.colleges.iter().map(|c| &c.id))?;
        unique_ids("common quota", self.quota_sets.iter().map(|p| &p.id))?;
        unique_ids("lower group", self.lower_groups.iter().map(|p| &p.id))?;

        for c in &self.colleges {
            if c.upper < 1 {
                return Err(InstanceError::ZeroUpper { college: c.id.clone() });
            }
            if c.lower > c.upper {
                return Err(InstanceError::LowerAboveUpper {
                    college: c.id.clone(),
                    lower: c.lower,
                    upper: c.upper,
                });
            }
        }

        let m = self.colleges.len();
        let mut ranks: HashMap<(usize, u32), ()> = HashMap::new();
        let mut targets: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        let mut scores: BTreeMap<(usize, usize), Score> = BTreeMap::new();
        for app in &self.applications {
            let who = self.applicants[app.applicant].id.clone();
            if app.rank == 0 {
                return Err(InstanceError::ZeroRank { applicant: who });
            }
            if ranks.insert((app.applicant, app.rank), ()).is_some() {
                return Err(InstanceError::DuplicateRank {
                    applicant: who,
                    rank: app.rank,
                });
            }
            let mut key: Vec<usize> = app.colleges().map(|(c, _)| c).collect();
            for &c in &key {
                if c >= m {
                    return Err(InstanceError::UnknownCollege {
                        id: format!("#{c}"),
                        context: format!("applicant {who}"),
                    });
                }
            }
            if let Target::Pair { colleges, .. } = app.target {
                if colleges[0] == colleges[1] {
                    return Err(InstanceError::PairNotDistinct {
                        applicant: who,
                        college: self.colleges[colleges[0]].id.clone(),
                    });
                }
            }
            key.sort_unstable();
            if !targets.insert((app.applicant, key)) {
                return Err(InstanceError::DuplicateTarget { applicant: who });
            }
            for (c, s) in app.colleges() {
                if s < 0 || s > self.max_score {
                    return Err(InstanceError::ScoreOutOfRange {
                        applicant: who,
                        college: self.colleges[c].id.clone(),
                        score: s,
                        max: self.max_score,
                    });
                }
                if let Some(&prev) = scores.get(&(app.applicant, c)) {
                    if prev != s {
                        return Err(InstanceError::InconsistentScore {
                            applicant: who,
                            college: self.colleges[c].id.clone(),
                        });
                    }
                }
                scores.insert((app.applicant, c), s);
            }
        }

        for p in &self.quota_sets {
            self.check_members("common quota", &p.id, &p.members)?;
            // Every applicant must carry one score across the whole set.
            for i in 0..self.applicants.len() {
                let mut seen: Option<Score> = None;
                for &c in &p.members {
                    if let Some(&s) = scores.get(&(i, c)) {
                        match seen {
                            Some(first) if first != s => {
                                return Err(InstanceError::UnequalScoresInSet {
                                    set: p.id.clone(),
                                    applicant: self.applicants[i].id.clone(),
                                    first,
                                    second: s,
                                })
                            }
                            _ => seen = Some(s),
                        }
                    }
                }
            }
        }
        for g in &self.lower_groups {
            self.check_members("lower group", &g.id, &g.members)?;
            if g.lower < 1 {
                return Err(InstanceError::ZeroGroupLower { id: g.id.clone() });
            }
        }
        Ok(())
    }

    fn check_members(
        &self,
        kind: &'static str,
        id: &str,
        members: &[usize],
    ) -> Result<(), InstanceError> {
        if members.is_empty() {
            return Err(InstanceError::EmptySet {
                kind,
                id: id.to_string(),
            });
        }
        let mut seen = BTreeSet::new();
        for &c in members {
            if c >= self.colleges.len() {
                return Err(InstanceError::UnknownCollege {
                    id: format!("#{c}"),
                    context: format!("{kind} {id}"),
                });
            }
            if !seen.insert(c) {
                return Err(InstanceError::DuplicateMember {
                    kind,
                    id: id.to_string(),
                    college: self.colleges[c].id.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn max_score(&self) -> Score {
        self.max_score
    }

    pub fn num_applicants(&self) -> usize {
        self.applicants.len()
    }

    pub fn num_colleges(&self) -> usize {
        self.colleges.len()
    }

    pub fn applicants(&self) -> &[Applicant] {
        &self.applicants
    }

    pub fn colleges(&self) -> &[College] {
        &self.colleges
    }

    pub fn college(&self, j: usize) -> &College {
        &self.colleges[j]
    }

    pub fn applications(&self) -> &[Application] {
        &self.applications
    }

    pub fn application(&self, e: usize) -> &Application {
        &self.applications[e]
    }

    pub fn quota_sets(&self) -> &[QuotaSet] {
        &self.quota_sets
    }

    pub fn lower_groups(&self) -> &[LowerGroup] {
        &self.lower_groups
    }

    /// Application indices of applicant `i`, most preferred first.
    pub fn list(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    /// Application indices (simple or paired) that involve college `j`.
    pub fn applications_at(&self, j: usize) -> &[usize] {
        &self.at_college[j]
    }

    /// Applications of the applicant behind `e` ranked at least as high as `e`.
    pub fn weakly_preferred(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let app = &self.applications[e];
        self.lists[app.applicant]
            .iter()
            .copied()
            .take_while(move |&k| self.applications[k].rank <= app.rank)
    }

    /// Applications of the applicant behind `e` ranked strictly higher than `e`.
    pub fn strictly_preferred(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let app = &self.applications[e];
        self.lists[app.applicant]
            .iter()
            .copied()
            .take_while(move |&k| self.applications[k].rank < app.rank)
    }

    pub fn college_index(&self, id: &str) -> Option<usize> {
        self.colleges.iter().position(|c| c.id == id)
    }

    pub fn applicant_index(&self, id: &str) -> Option<usize> {
        self.applicants.iter().position(|a| a.id == id)
    }

    pub fn has_paired(&self) -> bool {
        self.applications.iter().any(Application::is_paired)
    }

    pub fn has_lower_quotas(&self) -> bool {
        self.colleges.iter().any(|c| c.lower > 0) || !self.lower_groups.is_empty()
    }

    /// First college at which two distinct applicants share a score.
    pub fn tied_college(&self) -> Option<usize> {
        (0..self.colleges.len()).find(|&j| self.has_tie_among(&[j]))
    }

    /// First explicit quota set inside which two distinct applicants share a score.
    pub fn tied_quota_set(&self) -> Option<usize> {
        (0..self.quota_sets.len()).find(|&p| self.has_tie_among(&self.quota_sets[p].members))
    }

    fn has_tie_among(&self, members: &[usize]) -> bool {
        let mut by_score: BTreeMap<Score, usize> = BTreeMap::new();
        for &j in members {
            for &e in &self.at_college[j] {
                let app = &self.applications[e];
                let s = app.score_at(j).expect("indexed application involves college");
                match by_score.get(&s) {
                    Some(&other) if other != app.applicant => return true,
                    _ => {
                        by_score.insert(s, app.applicant);
                    }
                }
            }
        }
        false
    }

    /// True iff any two quota sets (with every singleton `{c_j}` implicitly
    /// present) are either disjoint or ordered by inclusion.
    pub fn is_nested(&self) -> bool {
        let sets: Vec<BTreeSet<usize>> = self
            .quota_sets
            .iter()
            .map(|p| p.members.iter().copied().collect())
            .collect();
        // Singletons never cross another set, so only explicit pairs matter.
        for (a, p) in sets.iter().enumerate() {
            for q in &sets[a + 1..] {
                let disjoint = p.is_disjoint(q);
                if !disjoint && !p.is_subset(q) && !q.is_subset(p) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of quota sets containing `j`, counting the singleton `{c_j}`.
    pub fn sets_containing(&self, j: usize) -> usize {
        1 + self
            .quota_sets
            .iter()
            .filter(|p| p.members.contains(&j))
            .count()
    }

    /// Human-readable label of an application target, e.g. `c1` or `c1&c2`.
    pub fn target_label(&self, e: usize) -> String {
        match self.applications[e].target {
            Target::Single { college, .. } => self.colleges[college].id.clone(),
            Target::Pair { colleges, .. } => format!(
                "{}&{}",
                self.colleges[colleges[0]].id, self.colleges[colleges[1]].id
            ),
        }
    }
}

fn unique_ids<'a>(
    kind: &'static str,
    ids: impl Iterator<Item = &'a String>,
) -> Result<(), InstanceError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(InstanceError::DuplicateId {
                kind,
                id: id.clone(),
            });
        }
    }
    Ok(())
}
