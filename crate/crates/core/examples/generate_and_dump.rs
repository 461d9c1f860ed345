//! Draw a seeded instance, print its JSON and the LP form of its model.

use stable_admissions::cli::instance_digest;
use stable_admissions::formulations::{build_scorelimits, LimitMode};
use stable_admissions::instance::{generate, to_json, GenConfig};

fn main() {
    let cfg = GenConfig { applicants: 3, colleges: 2, tie_density: 0.5, seed: 42, ..Default::default() };
    let inst = generate(&cfg).unwrap();
    println!("{}", to_json(&inst));
    println!("digest {}", instance_digest(&inst));
    let model = build_scorelimits(&inst, LimitMode::TiesMin).unwrap();
    print!("{}", model.to_lp());
}
