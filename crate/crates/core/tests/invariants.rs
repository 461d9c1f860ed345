mod common;

use common::*;
use proptest::prelude::*;
use stable_admissions::algorithms::{da, gs_scorelimits, lower_quota_heuristic, Side};
use stable_admissions::cli::{instance_digest, parse_solution, solution_json};
use stable_admissions::formulations::Solution;
use stable_admissions::instance::{parse_instance, to_json, Topology};
use stable_admissions::oracle::{audit_feasibility, check, enumerate_stable, Variant, Verdict};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn da_is_stable_on_both_sides(seed in any::<u64>()) {
        let inst = strict(seed);
        for side in [Side::Applicant, Side::College] {
            let m = da(&inst, side).unwrap();
            let r = check(&inst, &Solution::from_matching(m), Variant::Classical).unwrap();
            prop_assert!(r.is_stable(), "{side:?}: {:?}", r.violations);
        }
    }

    #[test]
    fn weak_and_classical_agree_without_ties(seed in any::<u64>()) {
        let inst = strict(seed);
        prop_assert_eq!(
            oracle_matchings(&inst, Variant::Classical),
            oracle_matchings(&inst, Variant::WeakTies)
        );
    }

    #[test]
    fn enumerated_solutions_pass_their_own_check(seed in any::<u64>()) {
        let cases = [
            (tied(seed, 4), Variant::WeakTies),
            (tied(seed, 3), Variant::ScorelimitsH),
            (with_lower(seed), Variant::Lower),
            (with_common(seed, Topology::Random), Variant::Common),
            (with_pairs(seed), Variant::Paired),
        ];
        for (inst, variant) in cases {
            for sol in enumerate_stable(&inst, variant, 1000).unwrap().solutions {
                let r = check(&inst, &sol, variant).unwrap();
                prop_assert!(r.is_stable(), "{variant:?}: {:?}", r.violations);
            }
        }
    }

    #[test]
    fn gs_limits_bracket_every_stable_vector(seed in any::<u64>()) {
        let inst = tied(seed, 3);
        let (m_low, low) = gs_scorelimits(&inst, Side::Applicant).unwrap();
        let (m_high, high) = gs_scorelimits(&inst, Side::College).unwrap();
        for (m, t) in [(m_low, low.clone()), (m_high, high.clone())] {
            let r = check(&inst, &Solution::with_limits(m, t), Variant::ScorelimitsH).unwrap();
            prop_assert!(r.is_stable(), "{:?}", r.violations);
        }
        for t in oracle_limits(&inst) {
            let t = stable_admissions::matching::ScoreLimits(t);
            prop_assert!(low.dominated_by(&t) && t.dominated_by(&high));
        }
    }

    #[test]
    fn heuristic_output_is_feasible(seed in any::<u64>()) {
        let inst = with_lower(seed);
        prop_assume!(inst.lower_groups().is_empty());
        let h = lower_quota_heuristic(&inst).unwrap();
        let mut sol = Solution::from_matching(h.matching);
        sol.open = Some(h.closed.iter().map(|c| !c).collect());
        prop_assert_ne!(audit_feasibility(&inst, &sol).unwrap().verdict, Verdict::Infeasible);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let inst = with_pairs(seed);
        let again = parse_instance(&to_json(&inst)).unwrap();
        prop_assert_eq!(instance_digest(&inst), instance_digest(&again));
        for sol in enumerate_stable(&inst, Variant::Paired, 20).unwrap().solutions {
            let text = solution_json(&inst, &sol).to_string();
            prop_assert_eq!(parse_solution(&inst, &text).unwrap(), sol);
        }
    }
}
