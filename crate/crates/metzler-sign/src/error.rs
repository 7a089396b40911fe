use std::fmt;

/// Error type shared by every analysis routine in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two matrices were expected to have compatible shapes.
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// A definite sign-matrix was required but an indefinite entry was found.
    IndefiniteEntry { row: usize, col: usize },
    /// The input must be Metzler (nonnegative off-diagonal entries).
    NotMetzler { row: usize, col: usize },
    /// A nonnegative matrix was required.
    NegativeEntry { row: usize, col: usize },
    /// Real matrices must hold finite values.
    NonFinite { row: usize, col: usize },
    /// A sign entry appeared where a real value was required.
    SignEntry { row: usize, col: usize },
    /// The graph contains a cycle where an acyclic one was required.
    CyclicGraph,
    /// The operation needs a sign-stable input.
    NotSignStable,
    /// An instability witness was requested for a sign-stable pattern.
    SignStable,
    /// A Hurwitz stable matrix was required.
    NotHurwitz { what: &'static str },
    /// Numerically singular matrix (pivot below threshold).
    Singular,
    /// A matrix rank precondition failed.
    RankDeficient,
    /// Problem size exceeds a hard limit of the routine.
    SizeExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    /// An enumeration would exceed the configured cap.
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },
    /// A family of matrices must be nonempty.
    EmptyFamily,
    /// The inputs admit no simultaneous triangularization.
    NotTriangularizable,
    /// A bounded parameter search ran out of budget.
    SearchExhausted { what: &'static str },
    /// Two routes that must agree returned different answers.
    Disagreement { context: String },
    /// Text input could not be parsed.
    Parse { line: usize, message: String },
    /// Any other violated precondition.
    Invalid { message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { left, right } => {
                write!(f, "shape mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix must be square, got {rows}x{cols}"),
            Error::IndefiniteEntry { row, col } => {
                write!(f, "indefinite entry at ({row},{col}); a definite sign-matrix is required")
            }
            Error::NotMetzler { row, col } => {
                write!(f, "not Metzler: negative off-diagonal entry at ({row},{col})")
            }
            Error::NegativeEntry { row, col } => {
                write!(f, "negative entry at ({row},{col}); a nonnegative matrix is required")
            }
            Error::NonFinite { row, col } => write!(f, "non-finite value at ({row},{col})"),
            Error::SignEntry { row, col } => {
                write!(f, "sign entry at ({row},{col}); a real value is required")
            }
            Error::CyclicGraph => write!(f, "graph contains a cycle"),
            Error::NotSignStable => write!(f, "input pattern is not sign-stable"),
            Error::SignStable => write!(f, "input pattern is sign-stable; no instability witness exists"),
            Error::NotHurwitz { what } => write!(f, "{what} is not Hurwitz stable"),
            Error::Singular => write!(f, "matrix is numerically singular"),
            Error::RankDeficient => write!(f, "matrix does not have full column rank"),
            Error::SizeExceeded { what, size, cap } => {
                write!(f, "{what}: size {size} exceeds the limit {cap}")
            }
            Error::CapExceeded { what, needed, cap } => {
                write!(f, "{what}: enumeration of {needed} cases exceeds the cap {cap}")
            }
            Error::EmptyFamily => write!(f, "family of matrices must be nonempty"),
            Error::NotTriangularizable => {
                write!(f, "matrices are not simultaneously triangularizable")
            }
            Error::SearchExhausted { what } => write!(f, "{what}: parameter search exhausted"),
            Error::Disagreement { context } => {
                write!(f, "internal disagreement between equivalent statements: {context}")
            }
            Error::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            Error::Invalid { message } => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for Error {}
