//! Error taxonomy shared across the library.
//!
//! Construction-time validation failures carry enough context to reproduce
//! the check that rejected the input; search routines distinguish "certified
//! absent" from "gave up" so callers can widen parameters.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("matrix is singular or nearly singular: |det| = {det} <= {tolerance}")]
    SingularMatrix { det: String, tolerance: String },
    #[error("normalization violated at row entry ({row},{col}) = {value}: last row must have entries in (0,1) with a 1 in the corner")]
    NormalizationViolated { row: usize, col: usize, value: String },
    #[error("projection injectivity heuristic failed: distinct lattice points {a:?} and {b:?} project within {tolerance} of each other")]
    InjectivityHeuristicFailed { a: Vec<i64>, b: Vec<i64>, tolerance: String },
    #[error("internal-space density heuristic failed: largest circular gap {gap} among {count} star values exceeds {threshold}")]
    DensityHeuristicFailed { gap: String, count: usize, threshold: String },
}

#[derive(Debug, Error)]
pub enum WindowError {
    #[error("invalid gap address {word:?}: addresses are nonempty 0-prefixed binary words")]
    InvalidAddress { word: String },
    #[error("window descriptor invalid: {reason}")]
    BadDescriptor { reason: String },
    #[error("window span {span} exceeds the finite-window guard {limit}")]
    UnboundedWindow { span: String, limit: String },
    #[error("inner approximation is not contained in the outer approximation near {witness}")]
    SandwichViolated { witness: String },
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("pattern set is empty at depth {depth}: the requested pattern cannot occur")]
    PatternSetEmpty { depth: u32 },
    #[error("no certified witness within radius {radius}; {tested} candidates tested, {uncertain} uncertain")]
    NotFoundWithinRadius { radius: String, tested: usize, uncertain: usize },
    #[error("enumeration budget of {budget} exceeded at {reached}; raise the cap or reduce the range")]
    BudgetExceeded { budget: u64, reached: u64 },
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("artifact {name} differs from recorded digest: expected {expected}, got {actual}")]
    DigestMismatch { name: String, expected: String, actual: String },
    #[error("manifest is malformed: {reason}")]
    BadManifest { reason: String },
}
