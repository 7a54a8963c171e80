use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse braid token {token:?}: {reason}")]
    BraidParse { token: String, reason: String },

    #[error("generator index {k} out of range for {n} strands")]
    StrandOutOfRange { k: usize, n: usize },

    #[error("ring descriptor mismatch: {0} vs {1}")]
    RingMismatch(String, String),

    #[error("variable {0} occurs with a negative exponent but its image is not invertible")]
    NotInvertible(String),

    #[error("no image given for coefficient variable {0}")]
    Unassigned(String),

    #[error("cannot parse coefficient text {text:?}: {reason}")]
    CoeffParse { text: String, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("substitution not in elementary form: {0}")]
    NotElementary(String),

    #[error("cannot destabilize: {0}")]
    Destabilize(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    /// An expansion would exceed [`EXPANSION_LIMIT`] intermediate terms.
    #[error("expression too large to expand: {0}")]
    TooLarge(String),

    #[error("malformed DGA document: {0}")]
    Document(String),

    /// Raised when an identity that must hold by construction fails.
    /// Indicates a bug, never a bad input.
    #[error("internal verification failure: {0}")]
    Internal(String),
}

/// Bound on the terms a single substitution may produce before cancellation.
pub const EXPANSION_LIMIT: u64 = 1_000_000;

impl Error {
    /// True for failures that point at an implementation bug rather than
    /// at the caller's input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
