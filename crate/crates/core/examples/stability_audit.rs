//! Auditing a hand-made matching against several stability definitions.

use stable_admissions::formulations::Solution;
use stable_admissions::instance::{Choice, InstanceBuilder};
use stable_admissions::matching::Matching;
use stable_admissions::oracle::{check, Variant};

fn main() {
    let inst = InstanceBuilder::new(9)
        .college("c1", 1)
        .applicant("a1", &[Choice::single("c1", 4)])
        .applicant("a2", &[Choice::single("c1", 6)])
        .build()
        .unwrap();

    // a1 holds the seat although a2 scores higher.
    let sol = Solution::from_matching(Matching::from_assignments(vec![Some(0), None]));
    for variant in [Variant::Classical, Variant::WeakTies, Variant::Common] {
        let report = check(&inst, &sol, variant).unwrap();
        println!("{}: {}", variant.label(), report.verdict.label());
        for v in &report.violations {
            println!("  {} {:?}: {}", v.kind.label(), v.involved, v.explanation);
        }
    }
}
