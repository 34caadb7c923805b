//! Crate-wide error type.
//!
//! Errors split into three families that the CLI maps onto exit codes:
//! degeneracies of the input point (a form vanishes, a tower misses a root),
//! precondition violations, and internal invariant failures that indicate a
//! bug rather than a bad input.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Zero has no square class and no inverse.
    #[error("zero input where a nonzero value is required")]
    ZeroInput,

    /// Two tower elements from different towers were combined.
    #[error("tower descriptor mismatch")]
    DescriptorMismatch,

    /// Generators handed to a tower constructor are F_2-dependent.
    #[error("tower generators are dependent: {0}")]
    DependentGenerators(String),

    /// Polynomial arity disagreement.
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// A linear substitution matrix is singular.
    #[error("singular substitution matrix")]
    SingularMatrix,

    /// The two points handed to a line restriction coincide.
    #[error("line through coincident points")]
    CoincidentPoints,

    /// All-zero plane or divisor where a nonzero one is required.
    #[error("zero {0} where a nonzero one is required")]
    ZeroObject(&'static str),

    /// The parameter point sits on a degeneration locus; the payload names
    /// the vanishing form or the failing configuration.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// A square root does not exist in the working tower.
    #[error("square root not available in tower: {0}")]
    TowerInsufficient(String),

    /// Numeric path tracking could not disambiguate a matching step even at
    /// the maximal step count.
    #[error("numeric tracking ambiguous: {0}")]
    TrackingAmbiguous(String),

    /// A structural invariant failed; this is a bug, not a bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that describe a legitimate degenerate input rather
    /// than a usage problem or a bug.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_) | Error::TowerInsufficient(_) | Error::TrackingAmbiguous(_)
        )
    }
}
