//! Exact extremal search over arc families, a registry binding bounds to
//! search problems, and constructive certificates for individual steps.

pub mod certificates;
mod engine;
mod problem;
pub mod registry;

pub use engine::{is_feasible, maximize, objective, validate_anti_monotone, SearchConfig, SearchReport, Witness, MAX_ELEMENTS};
pub use problem::{AllLevels, Constraint, Levels, Measure, Score, SearchProblem, Slot};
pub use registry::{verify_bound, Claim, Params, TheoremId, Verification};
