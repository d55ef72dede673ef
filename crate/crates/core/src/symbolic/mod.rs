//! Exact symbolic dynamics for the example systems.

mod lazy;
mod measure;
mod point;
mod retract;
mod system;
mod tilde;
mod walk;

pub use lazy::{sample_point, LazyPoint, LocalPoint};
pub use measure::{MeasureError, MeasureSpec};
pub use point::{find_index, Alphabet, PointError, Sequence, SymbolicPoint, SAMPLED_SEARCH_CAP};
pub use retract::{next_return, CoordinatePredicate, ReturnMode};
pub use system::{
    cocycle, preimage_mass, Certificate, CertificateSource, GeneratorSystem, LevelProfile, TreeSystem,
};
pub use tilde::{TildeBase, TildePoint, TildeSystem};
pub use walk::{random_walk_boundary_sample, WalkSample};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("invalid system parameters: {0}")]
    Parameter(String),
    #[error("point outside the domain of {system}: {reason}")]
    Domain { system: String, reason: String },
    #[error("points are not related")]
    NotRelated,
    #[error("expected alphabet {expected:?}, found {found:?}")]
    AlphabetMismatch { expected: Alphabet, found: Alphabet },
    #[error("vertex budget {budget} exhausted at depth {depth}")]
    Budget { budget: usize, depth: usize },
    #[error("tower level {level} exceeds n_max = {n_max}")]
    Truncated { level: usize, n_max: usize },
    #[error("{origin} and {terminus} are not adjacent")]
    NotAdjacent { origin: String, terminus: String },
    #[error("no return to the target set within {examined} iterates")]
    RecurrenceBudget { examined: usize },
    #[error("random walk used {steps} steps without stabilizing")]
    WalkBudget { steps: u64 },
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
