//! Seeded random instances for experiments and property tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{
    Applicant, Application, College, Instance, InstanceError, LowerGroup, QuotaSet, Score, Target,
};

/// Shape of the common-quota set system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    None,
    /// Laminar family: any two sets are disjoint or nested.
    Nested,
    /// Arbitrary subsets; may cross.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub applicants: usize,
    pub colleges: usize,
    /// Inclusive range of list lengths, clipped to the available targets.
    pub list_len: (usize, usize),
    pub max_score: Score,
    /// Probability that a drawn score copies a score already used at the same
    /// colleges. Zero forbids ties entirely.
    pub tie_density: f64,
    pub upper: (u32, u32),
    pub lower: (u32, u32),
    pub topology: Topology,
    pub quota_sets: usize,
    pub set_upper: (u32, u32),
    pub lower_groups: usize,
    pub group_lower: (u32, u32),
    /// Probability that a list entry is a paired application.
    pub paired_prob: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            applicants: 6,
            colleges: 3,
            list_len: (1, 3),
            max_score: 5,
            tie_density: 0.0,
            upper: (1, 2),
            lower: (0, 0),
            topology: Topology::None,
            quota_sets: 0,
            set_upper: (1, 2),
            lower_groups: 0,
            group_lower: (1, 2),
            paired_prob: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("unsatisfiable configuration: {0}")]
    Unsatisfiable(String),
    #[error("generated instance failed validation: {0}")]
    Invalid(#[from] InstanceError),
}

fn check_config(cfg: &GenConfig) -> Result<(), GenError> {
    let bad = |msg: &str| Err(GenError::Unsatisfiable(msg.to_string()));
    for p in [cfg.tie_density, cfg.paired_prob] {
        if !(0.0..=1.0).contains(&p) {
            return bad("probabilities must lie in [0, 1]");
        }
    }
    if cfg.list_len.0 > cfg.list_len.1
        || cfg.upper.0 > cfg.upper.1
        || cfg.lower.0 > cfg.lower.1
        || cfg.set_upper.0 > cfg.set_upper.1
        || cfg.group_lower.0 > cfg.group_lower.1
    {
        return bad("range lower end exceeds upper end");
    }
    if cfg.upper.0 < 1 {
        return bad("upper quotas must be at least 1");
    }
    if cfg.group_lower.0 < 1 && cfg.lower_groups > 0 {
        return bad("group lower quotas must be at least 1");
    }
    if cfg.max_score < 0 {
        return bad("max_score must be non-negative");
    }
    if cfg.colleges == 0 && (cfg.quota_sets > 0 || cfg.lower_groups > 0) {
        return bad("quota sets and lower groups need at least one college");
    }
    if cfg.colleges == 0 && cfg.topology != Topology::None && cfg.quota_sets > 0 {
        return bad("a set topology needs at least one college");
    }
    if cfg.tie_density == 0.0 && (cfg.max_score + 1) < cfg.applicants as Score {
        return bad("tie density 0 needs at least as many distinct scores as applicants");
    }
    if cfg.paired_prob > 0.0 && cfg.colleges < 2 {
        return bad("paired applications need at least two colleges");
    }
    Ok(())
}

/// Draws an instance; the seed fully determines the result.
pub fn generate(cfg: &GenConfig) -> Result<Instance, GenError> {
    check_config(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = cfg.colleges;
    let n = cfg.applicants;

    let colleges: Vec<College> = (0..m)
        .map(|j| {
            let upper = rng.gen_range(cfg.upper.0..=cfg.upper.1);
            let lower = rng.gen_range(cfg.lower.0..=cfg.lower.1).min(upper);
            College {
                id: format!("c{}", j + 1),
                upper,
                lower,
            }
        })
        .collect();

    let quota_sets = match cfg.topology {
        Topology::None => Vec::new(),
        Topology::Nested => nested_sets(&mut rng, m, cfg.quota_sets),
        Topology::Random => random_sets(&mut rng, m, cfg.quota_sets),
    }
    .into_iter()
    .enumerate()
    .map(|(p, members)| QuotaSet {
        id: format!("p{}", p + 1),
        members,
        upper: rng.gen_range(cfg.set_upper.0..=cfg.set_upper.1),
    })
    .collect::<Vec<_>>();

    let lower_groups = (0..cfg.lower_groups)
        .map(|g| {
            let size = rng.gen_range(1..=m);
            let mut members: Vec<usize> = (0..m).collect();
            members.shuffle(&mut rng);
            members.truncate(size);
            members.sort_unstable();
            LowerGroup {
                id: format!("g{}", g + 1),
                members,
                lower: rng.gen_range(cfg.group_lower.0..=cfg.group_lower.1),
            }
        })
        .collect::<Vec<_>>();

    // Targets available to every applicant.
    let singles: Vec<[usize; 2]> = (0..m).map(|j| [j, j]).collect();
    let pairs: Vec<[usize; 2]> = (0..m)
        .flat_map(|j| (j + 1..m).map(move |k| [j, k]))
        .collect();

    let mut lists: Vec<Vec<[usize; 2]>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut free_singles = singles.clone();
        let mut free_pairs = pairs.clone();
        let want = rng.gen_range(cfg.list_len.0..=cfg.list_len.1);
        let mut list = Vec::new();
        if cfg.paired_prob == 0.0 {
            free_pairs.clear();
        }
        while list.len() < want && !(free_singles.is_empty() && free_pairs.is_empty()) {
            let use_pair = !free_pairs.is_empty()
                && (free_singles.is_empty() || rng.gen_bool(cfg.paired_prob));
            let pool = if use_pair {
                &mut free_pairs
            } else {
                &mut free_singles
            };
            let k = rng.gen_range(0..pool.len());
            list.push(pool.swap_remove(k));
        }
        lists.push(list);
    }

    // Colleges linked by a common quota share one score per applicant.
    let component = components(m, &quota_sets);
    let mut comp_scores: Vec<Vec<Option<Score>>> = vec![vec![None; m]; n];
    let mut used: Vec<Vec<Score>> = vec![Vec::new(); m];
    for (i, list) in lists.iter().enumerate() {
        for target in list {
            for &j in target {
                let c = component[j];
                if comp_scores[i][c].is_some() {
                    continue;
                }
                let s = draw_score(&mut rng, cfg, &used[c])?;
                used[c].push(s);
                comp_scores[i][c] = Some(s);
            }
        }
    }

    let applicants = (0..n)
        .map(|i| Applicant {
            id: format!("a{}", i + 1),
        })
        .collect();
    let mut applications = Vec::new();
    for (i, list) in lists.iter().enumerate() {
        for (pos, t) in list.iter().enumerate() {
            let score = |j: usize| comp_scores[i][component[j]].expect("drawn above");
            let target = if t[0] == t[1] {
                Target::Single {
                    college: t[0],
                    score: score(t[0]),
                }
            } else {
                Target::Pair {
                    colleges: *t,
                    scores: [score(t[0]), score(t[1])],
                }
            };
            applications.push(Application {
                applicant: i,
                rank: pos as u32 + 1,
                target,
            });
        }
    }

    Ok(Instance::new(
        cfg.max_score,
        applicants,
        colleges,
        applications,
        quota_sets,
        lower_groups,
    )?)
}

fn draw_score(rng: &mut ChaCha8Rng, cfg: &GenConfig, used: &[Score]) -> Result<Score, GenError> {
    if !used.is_empty() && cfg.tie_density > 0.0 && rng.gen_bool(cfg.tie_density) {
        return Ok(used[rng.gen_range(0..used.len())]);
    }
    let fresh: Vec<Score> = (0..=cfg.max_score).filter(|s| !used.contains(s)).collect();
    if fresh.is_empty() {
        if cfg.tie_density == 0.0 {
            return Err(GenError::Unsatisfiable(
                "not enough distinct scores for a tie-free instance".into(),
            ));
        }
        return Ok(rng.gen_range(0..=cfg.max_score));
    }
    Ok(fresh[rng.gen_range(0..fresh.len())])
}

fn components(m: usize, sets: &[QuotaSet]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for p in sets {
        for w in p.members.windows(2) {
            let a = find(&mut parent, w[0]);
            let b = find(&mut parent, w[1]);
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..m).map(|j| find(&mut parent, j)).collect()
}

/// Intervals of a random permutation, kept only if laminar with the ones so far.
fn nested_sets(rng: &mut ChaCha8Rng, m: usize, count: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    let mut tries = 0;
    while intervals.len() < count && tries < 50 * (count + 1) {
        tries += 1;
        let a = rng.gen_range(0..m);
        let b = rng.gen_range(a..m);
        let laminar = intervals
            .iter()
            .all(|&(c, d)| b < c || d < a || (c <= a && b <= d) || (a <= c && d <= b));
        if laminar && !intervals.contains(&(a, b)) {
            intervals.push((a, b));
        }
    }
    intervals
        .into_iter()
        .map(|(a, b)| {
            let mut s: Vec<usize> = order[a..=b].to_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

fn random_sets(rng: &mut ChaCha8Rng, m: usize, count: usize) -> Vec<Vec<usize>> {
    (0..count)
        .map(|_| {
            let size = if m >= 2 { rng.gen_range(2..=m) } else { 1 };
            let mut s: Vec<usize> = (0..m).collect();
            s.shuffle(rng);
            s.truncate(size);
            s.sort_unstable();
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, to_json};

    #[test]
    fn degenerate_config_gives_empty_instance() {
        let inst = generate(&GenConfig {
            applicants: 0,
            colleges: 1,
            ..Default::default()
        })
        .unwrap();
        assert!(inst.applications().is_empty());
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = GenConfig {
            seed: 42,
            tie_density: 0.3,
            paired_prob: 0.2,
            topology: Topology::Nested,
            quota_sets: 2,
            ..Default::default()
        };
        assert_eq!(
            to_json(&generate(&cfg).unwrap()),
            to_json(&generate(&cfg).unwrap())
        );
    }

    #[test]
    fn long_lists_stay_simple_without_pairs() {
        let cfg = GenConfig {
            applicants: 3,
            colleges: 2,
            list_len: (3, 3),
            ..Default::default()
        };
        for seed in 0..20 {
            let inst = generate(&GenConfig { seed, ..cfg.clone() }).unwrap();
            assert!(!inst.has_paired());
            assert!((0..3).all(|i| inst.list(i).len() == 2));
        }
    }

    #[test]
    fn zero_tie_density_gives_distinct_scores() {
        let cfg = GenConfig {
            seed: 7,
            applicants: 6,
            colleges: 3,
            max_score: 5,
            list_len: (3, 3),
            ..Default::default()
        };
        let inst = generate(&cfg).unwrap();
        for j in 0..inst.num_colleges() {
            let mut seen = std::collections::BTreeSet::new();
            for &e in inst.applications_at(j) {
                assert!(seen.insert(inst.application(e).score_at(j).unwrap()));
            }
        }
        assert_eq!(inst.tied_college(), None);
    }

    #[test]
    fn nested_topology_requires_colleges() {
        let err = generate(&GenConfig {
            colleges: 0,
            topology: Topology::Nested,
            quota_sets: 1,
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, GenError::Unsatisfiable(_)));
    }

    #[test]
    fn nested_topology_is_nested() {
        for seed in 0..200 {
            let inst = generate(&GenConfig {
                seed,
                colleges: 5,
                topology: Topology::Nested,
                quota_sets: 4,
                ..Default::default()
            })
            .unwrap();
            assert!(inst.is_nested(), "seed {seed}");
        }
    }

    #[test]
    fn fuzzed_configs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..1000u64 {
            let topology = [Topology::None, Topology::Nested, Topology::Random][seed as usize % 3];
            let cfg = GenConfig {
                seed,
                applicants: rng.gen_range(0..8),
                colleges: rng.gen_range(2..5),
                list_len: (0, 4),
                max_score: rng.gen_range(7..12),
                tie_density: rng.gen_range(0.0..1.0),
                upper: (1, 3),
                lower: (0, 2),
                topology,
                quota_sets: rng.gen_range(0..3),
                lower_groups: rng.gen_range(0..2),
                paired_prob: rng.gen_range(0.0..0.5),
                ..Default::default()
            };
            let inst = generate(&cfg).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(parse_instance(&to_json(&inst)).unwrap(), inst);
        }
    }
}
