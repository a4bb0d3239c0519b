//! Random instances, the verification suite and its reports.

mod generate;

pub use generate::{
    circle_point, disk_point, generate_instance, random_coords, random_inner, random_laurent, rng, unit_box, InstanceConstraints,
    ProblemSpec, TrialRng, MAX_DEGREE, SCHEMA, ZERO_RADIUS,
};
mod trials;

pub use trials::{find, limits, Check, Evaluator, Generator, Outcome, TrialContext, CHECKS};
mod suite;

pub use suite::{
    replay, run_check, run_suite, trial_seed, CheckReport, Counterexample, SuiteConfig, SuiteReport, TrialRecord, MAX_COUNTEREXAMPLES,
};
