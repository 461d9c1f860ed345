//! JSON instance documents.
//!
//! ```json
//! {
//!   "max_score": 10,
//!   "colleges": [{"id": "c1", "upper": 2, "lower": 1}],
//!   "applicants": [
//!     {"id": "a1", "list": [
//!       {"rank": 1, "pair": ["c1", "c2"], "scores": [7, 7]},
//!       {"rank": 2, "college": "c1", "score": 7}
//!     ]}
//!   ],
//!   "common_quotas": [{"id": "p1", "members": ["c1", "c2"], "upper": 3}],
//!   "lower_groups": [{"id": "g1", "members": ["c1", "c2"], "lower": 2}]
//! }
//! ```

use serde::{Deserialize, Serialize};

use super::{
    Applicant, Application, College, Instance, InstanceError, LowerGroup, QuotaSet, Score, Target,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    max_score: Score,
    colleges: Vec<CollegeDoc>,
    applicants: Vec<ApplicantDoc>,
    #[serde(default)]
    common_quotas: Vec<QuotaDoc>,
    #[serde(default)]
    lower_groups: Vec<GroupDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollegeDoc {
    id: String,
    upper: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    lower: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplicantDoc {
    id: String,
    list: Vec<EntryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    college: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pair: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<Score>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scores: Option<[Score; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotaDoc {
    id: String,
    members: Vec<String>,
    upper: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDoc {
    id: String,
    members: Vec<String>,
    lower: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDoc = serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        schema(path, err.into_inner().to_string())
    })?;
    from_doc(doc)
}

fn from_doc(doc: InstanceDoc) -> Result<Instance, InstanceError> {
    let college_index = |id: &str, path: &str| -> Result<usize, InstanceError> {
        doc.colleges
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| InstanceError::UnknownCollege {
                id: id.to_string(),
                context: path.to_string(),
            })
    };

    let mut applicants = Vec::with_capacity(doc.applicants.len());
    let mut applications = Vec::new();
    for (i, a) in doc.applicants.iter().enumerate() {
        applicants.push(Applicant { id: a.id.clone() });
        for (k, entry) in a.list.iter().enumerate() {
            let path = format!("applicants[{i}].list[{k}]");
            let target = match (&entry.college, &entry.pair, entry.score, entry.scores) {
                (Some(c), None, Some(score), None) => Target::Single {
                    college: college_index(c, &path)?,
                    score,
                },
                (None, Some([c, d]), None, Some(scores)) => Target::Pair {
                    colleges: [college_index(c, &path)?, college_index(d, &path)?],
                    scores,
                },
                (Some(_), None, _, _) => {
                    return Err(schema(path, "simple entry needs `score` and no `scores`"))
                }
                (None, Some(_), _, _) => {
                    return Err(schema(path, "paired entry needs `scores` and no `score`"))
                }
                _ => return Err(schema(path, "exactly one of `college` or `pair` is required")),
            };
            applications.push(Application {
                applicant: i,
                rank: entry.rank,
                target,
            });
        }
    }

    let members = |ids: &[String], path: String| -> Result<Vec<usize>, InstanceError> {
        ids.iter().map(|id| college_index(id, &path)).collect()
    };
    let quota_sets = doc
        .common_quotas
        .iter()
        .enumerate()
        .map(|(p, q)| {
            Ok(QuotaSet {
                id: q.id.clone(),
                members: members(&q.members, format!("common_quotas[{p}]"))?,
                upper: q.upper,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let lower_groups = doc
        .lower_groups
        .iter()
        .enumerate()
        .map(|(p, g)| {
            Ok(LowerGroup {
                id: g.id.clone(),
                members: members(&g.members, format!("lower_groups[{p}]"))?,
                lower: g.lower,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    let colleges = doc
        .colleges
        .into_iter()
        .map(|c| College {
            id: c.id,
            upper: c.upper,
            lower: c.lower,
        })
        .collect();

    Instance::new(
        doc.max_score,
        applicants,
        colleges,
        applications,
        quota_sets,
        lower_groups,
    )
}

fn to_doc(inst: &Instance) -> InstanceDoc {
    let cid = |j: usize| inst.college(j).id.clone();
    let applicants = (0..inst.num_applicants())
        .map(|i| ApplicantDoc {
            id: inst.applicants()[i].id.clone(),
            list: inst
                .list(i)
                .iter()
                .map(|&e| {
                    let app = inst.application(e);
                    match app.target {
                        Target::Single { college, score } => EntryDoc {
                            rank: app.rank,
                            college: Some(cid(college)),
                            pair: None,
                            score: Some(score),
                            scores: None,
                        },
                        Target::Pair { colleges, scores } => EntryDoc {
                            rank: app.rank,
                            college: None,
                            pair: Some([cid(colleges[0]), cid(colleges[1])]),
                            score: None,
                            scores: Some(scores),
                        },
                    }
                })
                .collect(),
        })
        .collect();
    InstanceDoc {
        max_score: inst.max_score(),
        colleges: inst
            .colleges()
            .iter()
            .map(|c| CollegeDoc {
                id: c.id.clone(),
                upper: c.upper,
                lower: c.lower,
            })
            .collect(),
        applicants,
        common_quotas: inst
            .quota_sets()
            .iter()
            .map(|q| QuotaDoc {
                id: q.id.clone(),
                members: q.members.iter().map(|&j| cid(j)).collect(),
                upper: q.upper,
            })
            .collect(),
        lower_groups: inst
            .lower_groups()
            .iter()
            .map(|g| GroupDoc {
                id: g.id.clone(),
                members: g.members.iter().map(|&j| cid(j)).collect(),
                lower: g.lower,
            })
            .collect(),
    }
}

/// Serializes an instance as pretty-printed JSON.
pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&to_doc(inst)).expect("instance documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const I1: &str = r#"{
        "max_score": 10,
        "colleges": [{"id": "c1", "upper": 1}],
        "applicants": [{"id": "a1", "list": [{"rank": 1, "college": "c1", "score": 5}]}]
    }"#;

    #[test]
    fn minimal_document() {
        let inst = parse_instance(I1).unwrap();
        assert_eq!(inst.num_applicants(), 1);
        assert_eq!(inst.num_colleges(), 1);
        assert_eq!(inst.applications().len(), 1);
    }

    #[test]
    fn duplicate_rank_is_reported() {
        let text = r#"{"max_score": 9, "colleges": [{"id": "c1", "upper": 1}, {"id": "c2", "upper": 1}],
            "applicants": [{"id": "a1", "list": [
                {"rank": 1, "college": "c1", "score": 1},
                {"rank": 1, "college": "c2", "score": 1}]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("duplicate rank"), "{err}");
    }

    #[test]
    fn unequal_scores_inside_set_are_reported() {
        let text = r#"{"max_score": 9, "colleges": [{"id": "c1", "upper": 1}, {"id": "c2", "upper": 1}],
            "applicants": [{"id": "a1", "list": [
                {"rank": 1, "college": "c1", "score": 7},
                {"rank": 2, "college": "c2", "score": 6}]}],
            "common_quotas": [{"id": "p", "members": ["c1", "c2"], "upper": 1}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("unequal scores inside quota set"), "{err}");
    }

    #[test]
    fn schema_errors_name_the_path() {
        let text = r#"{"max_score": 9, "colleges": [{"id": "c1", "upper": 1}],
            "applicants": [{"id": "a1", "list": [{"rank": 1, "college": "c1", "score": 2.5}]}]}"#;
        match parse_instance(text).unwrap_err() {
            InstanceError::Schema { path, .. } => assert_eq!(path, "applicants[0].list[0].score"),
            other => panic!("unexpected {other}"),
        }
        let text = r#"{"max_score": 9, "colleges": [{"id": "c1", "upper": 1}],
            "applicants": [{"id": "a1", "list": [{"rank": 1, "score": 2}]}]}"#;
        match parse_instance(text).unwrap_err() {
            InstanceError::Schema { path, .. } => assert_eq!(path, "applicants[0].list[0]"),
            other => panic!("unexpected {other}"),
        }
        let err = parse_instance(r#"{"colleges": []}"#).unwrap_err();
        assert!(matches!(err, InstanceError::Schema { .. }));
    }

    #[test]
    fn unknown_college_is_reported() {
        let text = r#"{"max_score": 9, "colleges": [{"id": "c1", "upper": 1}],
            "applicants": [{"id": "a1", "list": [{"rank": 1, "college": "zz", "score": 2}]}]}"#;
        assert!(matches!(
            parse_instance(text).unwrap_err(),
            InstanceError::UnknownCollege { .. }
        ));
    }

    #[test]
    fn serialization_is_stable() {
        let inst = parse_instance(I1).unwrap();
        let text = to_json(&inst);
        let again = parse_instance(&text).unwrap();
        assert_eq!(inst, again);
        assert_eq!(text, to_json(&again));
    }
}
