//! Exact solvers for college admissions with the special features of
//! centralised university admission schemes: score-limits (cutoff scores) with
//! ties, lower quotas, common upper quotas over sets of colleges, and paired
//! applications.
//!
//! The crate is organised in layers:
//!
//! - [`instance`]: the problem data, its JSON format and a seeded generator.
//! - [`model`] and [`formulations`]: integer linear programs, one builder per
//!   stability concept, plus extraction of typed [`formulations::Solution`]s.
//! - [`solver`]: an exact bounded-integer branch-and-bound with lexicographic
//!   objectives and projected enumeration of feasible solutions.
//! - [`algorithms`]: deferred acceptance, the score-limit Gale-Shapley variant
//!   for ties, and the closing heuristic for lower quotas.
//! - [`oracle`]: definition-level stability checks and brute-force enumeration
//!   of all stable solutions; the ground truth the models are tested against.
//! - [`preprocess`]: fixing colleges that must be open or closed under lower
//!   quotas.
//! - [`cli`]: the `admit` command-line front end.

pub mod algorithms;
pub mod cli;
pub mod formulations;
pub mod instance;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod preprocess;
pub mod solver;

mod precondition;

pub use precondition::PreconditionError;
