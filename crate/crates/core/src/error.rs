//! Error type shared by the core modules.

use alloc::string::String;
use core::fmt;

/// Errors produced by corpus refinement, feature scoring, training,
/// prediction, and fold planning.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Term selection and cross-validation folds need at least two classes.
    SingleClass,
    /// Training requires at least one labelled vector.
    EmptyTrainingSet,
    /// Smoothing constant must be strictly positive.
    InvalidAlpha(f64),
    /// Selection fraction must be in (0, 1].
    InvalidFraction(f64),
    /// Developer-activity threshold must be at least 1.
    InvalidMinFixed,
    /// Metrics cannot be computed from an empty prediction log.
    EmptyLog,
    /// A categorical field name that is not part of the bug-report model.
    UnknownField(String),
    /// Vector does not match the model's configured shape.
    ShapeMismatch { expected: usize, got: usize },
    /// A term column id outside the selected vocabulary.
    TermOutOfRange { column: u32, vocabulary: usize },
    /// Two aligned collections disagree in length (rows vs labels, plan vs corpus).
    LengthMismatch { left: usize, right: usize },
    /// Fold count must be at least 2.
    TooFewFolds(usize),
    /// Fold count exceeds the corpus size.
    TooManyFolds { folds: usize, reports: usize },
    /// Top-k requests must ask for at least one candidate.
    InvalidTopK,
    /// A probability-table invariant failed to hold.
    BrokenInvariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingleClass => write!(f, "operation is undefined on a single-class corpus"),
            Error::EmptyTrainingSet => write!(f, "training set is empty"),
            Error::InvalidAlpha(a) => write!(f, "smoothing constant must be > 0, got {a}"),
            Error::InvalidFraction(p) => write!(f, "selection fraction must be in (0, 1], got {p}"),
            Error::InvalidMinFixed => write!(f, "developer-activity threshold must be >= 1"),
            Error::EmptyLog => write!(f, "prediction log is empty"),
            Error::UnknownField(name) => write!(f, "unknown categorical field: {name}"),
            Error::ShapeMismatch { expected, got } => {
                write!(
                    f,
                    "vector has {got} categorical slots, model expects {expected}"
                )
            }
            Error::TermOutOfRange { column, vocabulary } => {
                write!(
                    f,
                    "term column {column} outside selected vocabulary of size {vocabulary}"
                )
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "aligned collections differ in length: {left} vs {right}")
            }
            Error::TooFewFolds(k) => write!(f, "cross-validation needs k >= 2 folds, got {k}"),
            Error::TooManyFolds { folds, reports } => {
                write!(f, "{folds} folds exceed corpus size {reports}")
            }
            Error::InvalidTopK => write!(f, "top-k must be at least 1"),
            Error::BrokenInvariant(what) => write!(f, "probability invariant violated: {what}"),
        }
    }
}

impl core::error::Error for Error {}
