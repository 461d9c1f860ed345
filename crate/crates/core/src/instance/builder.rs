use super::{
    Applicant, Application, College, Instance, InstanceError, LowerGroup, QuotaSet, Score, Target,
};

/// One entry of an applicant's list, by college id. Ranks follow list order.
#[derive(Debug, Clone)]
pub enum Choice {
    Single(String, Score),
    Pair([String; 2], [Score; 2]),
}

impl Choice {
    pub fn single(college: &str, score: Score) -> Self {
        Choice::Single(college.to_string(), score)
    }

    pub fn pair(first: &str, second: &str, first_score: Score, second_score: Score) -> Self {
        Choice::Pair(
            [first.to_string(), second.to_string()],
            [first_score, second_score],
        )
    }
}

/// Id-based construction of an [`Instance`], mostly for tests and examples.
///
/// ```
/// use stable_admissions::instance::{Choice, InstanceBuilder};
///
/// let inst = InstanceBuilder::new(10)
///     .college("c1", 1)
///     .applicant("a1", &[Choice::single("c1", 7)])
///     .applicant("a2", &[Choice::single("c1", 3)])
///     .build()
///     .unwrap();
/// assert_eq!(inst.applications().len(), 2);
/// ```
#[derive(Debug, Clone, Default)]
pub struct InstanceBuilder {
    max_score: Score,
    colleges: Vec<College>,
    applicants: Vec<(String, Vec<Choice>)>,
    quota_sets: Vec<(String, Vec<String>, u32)>,
    lower_groups: Vec<(String, Vec<String>, u32)>,
}

impl InstanceBuilder {
    pub fn new(max_score: Score) -> Self {
        InstanceBuilder {
            max_score,
            ..Default::default()
        }
    }

    pub fn college(self, id: &str, upper: u32) -> Self {
        self.college_with_lower(id, upper, 0)
    }

    pub fn college_with_lower(mut self, id: &str, upper: u32, lower: u32) -> Self {
        self.colleges.push(College {
            id: id.to_string(),
            upper,
            lower,
        });
        self
    }

    pub fn applicant(mut self, id: &str, list: &[Choice]) -> Self {
        self.applicants.push((id.to_string(), list.to_vec()));
        self
    }

    pub fn common_quota(mut self, id: &str, members: &[&str], upper: u32) -> Self {
        self.quota_sets.push((
            id.to_string(),
            members.iter().map(|s| s.to_string()).collect(),
            upper,
        ));
        self
    }

    pub fn lower_group(mut self, id: &str, members: &[&str], lower: u32) -> Self {
        self.lower_groups.push((
            id.to_string(),
            members.iter().map(|s| s.to_string()).collect(),
            lower,
        ));
        self
    }

    pub fn build(self) -> Result<Instance, InstanceError> {
        let colleges = self.colleges;
        let lookup = |id: &str, context: &str| -> Result<usize, InstanceError> {
            colleges
                .iter()
                .position(|c| c.id == id)
                .ok_or_else(|| InstanceError::UnknownCollege {
                    id: id.to_string(),
                    context: context.to_string(),
                })
        };

        let mut applicants = Vec::new();
        let mut applications = Vec::new();
        for (i, (id, list)) in self.applicants.iter().enumerate() {
            applicants.push(Applicant { id: id.clone() });
            let context = format!("applicant {id}");
            for (pos, choice) in list.iter().enumerate() {
                let target = match choice {
                    Choice::Single(c, s) => Target::Single {
                        college: lookup(c, &context)?,
                        score: *s,
                    },
                    Choice::Pair([c, d], scores) => Target::Pair {
                        colleges: [lookup(c, &context)?, lookup(d, &context)?],
                        scores: *scores,
                    },
                };
                applications.push(Application {
                    applicant: i,
                    rank: pos as u32 + 1,
                    target,
                });
            }
        }

        let mut quota_sets = Vec::new();
        for (id, members, upper) in &self.quota_sets {
            let context = format!("common quota {id}");
            let members = members
                .iter()
                .map(|m| lookup(m, &context))
                .collect::<Result<_, _>>()?;
            quota_sets.push(QuotaSet {
                id: id.clone(),
                members,
                upper: *upper,
            });
        }
        let mut lower_groups = Vec::new();
        for (id, members, lower) in &self.lower_groups {
            let context = format!("lower group {id}");
            let members = members
                .iter()
                .map(|m| lookup(m, &context))
                .collect::<Result<_, _>>()?;
            lower_groups.push(LowerGroup {
                id: id.clone(),
                members,
                lower: *lower,
            });
        }

        Instance::new(
            self.max_score,
            applicants,
            colleges,
            applications,
            quota_sets,
            lower_groups,
        )
    }
}
