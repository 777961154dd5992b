use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring descriptor: {0}")]
    InvalidRing(String),
    #[error("ring {0} is infinite and cannot be enumerated")]
    NonEnumerableRing(String),
    #[error("ring {0} is too large for table arithmetic")]
    RingTooLarge(String),
    #[error("element {element} is not an idempotent of {ring}")]
    NotIdempotent { ring: String, element: String },
    #[error("cannot parse element {text:?} of ring {ring}")]
    BadElement { ring: String, text: String },
    #[error("rings {from} and {to} are incompatible")]
    IncompatibleRings { from: String, to: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("bilinear form is not symmetric")]
    NotSymmetric,
    #[error("generic trace is degenerate")]
    DegenerateTrace,

    #[error("structure fails the {0} axiom")]
    AxiomFailure(String),
    #[error("bad dimensions: {0}")]
    BadDims(String),
    #[error("no square root of -1 in {0}")]
    NoSquareRootOfMinusOne(String),

    #[error("matrix is not a similitude")]
    NotSimilitude,
    #[error("matrix is not an isometry")]
    NotIsometry,
    #[error("twisted maps of opposite signs do not compose")]
    MixedSigns,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("triple automorphism does not factor as r*psi; reproducer: {0}")]
    NotFactorable(String),

    #[error("candidate space of {candidates} exceeds budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error("cannot compare automorphism sets of {0} and {1}")]
    MixedSystems(String, String),
    #[error("grading violated: {0}")]
    GradingViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Variant name, for structured reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidRing(_) => "InvalidRing",
            Error::NonEnumerableRing(_) => "NonEnumerableRing",
            Error::RingTooLarge(_) => "RingTooLarge",
            Error::NotIdempotent { .. } => "NotIdempotent",
            Error::BadElement { .. } => "BadElement",
            Error::IncompatibleRings { .. } => "IncompatibleRings",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotInvertible => "NotInvertible",
            Error::DegenerateForm => "DegenerateForm",
            Error::NotSymmetric => "NotSymmetric",
            Error::DegenerateTrace => "DegenerateTrace",
            Error::AxiomFailure(_) => "AxiomFailure",
            Error::BadDims(_) => "BadDims",
            Error::NoSquareRootOfMinusOne(_) => "NoSquareRootOfMinusOne",
            Error::NotSimilitude => "NotSimilitude",
            Error::NotIsometry => "NotIsometry",
            Error::MixedSigns => "MixedSigns",
            Error::BadInput(_) => "BadInput",
            Error::NotFactorable(_) => "NotFactorable",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::MixedSystems(..) => "MixedSystems",
            Error::GradingViolation(_) => "GradingViolation",
            Error::Parse(_) => "Parse",
            Error::UnknownClaim(_) => "UnknownClaim",
        }
    }
}
