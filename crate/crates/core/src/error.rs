use thiserror::Error;

/// Crate-wide error type. Every fallible operation reports through this enum;
/// the variant names the contract that was violated, the payload says where.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A point or interval fell outside the domain an operation requires.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource cap (breakpoint count, orbit length) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Two symbolic objects over different alphabets were combined.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// A horseshoe certificate failed verification or cannot drive a pullback.
    #[error("certificate error: {0}")]
    Cert(String),

    /// A point that must sit strictly inside a nonzero-slope lap does not.
    #[error("plateau error: {0}")]
    Plateau(String),

    /// A forward orbit failed to close up within the configured cap.
    #[error("orbit not eventually periodic within cap: {0}")]
    NonEventuallyPeriodic(String),

    /// Collar placement around a lifted preimage is impossible as configured.
    #[error("collar overlap: {0}")]
    CollarOverlap(String),

    /// An orbit table is inconsistent (empty, or its transition is not total).
    #[error("orbit error: {0}")]
    Orbit(String),

    /// An operation's stated precondition does not hold for the given input.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// Text or JSON input could not be parsed into a valid object.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed input that violates a construction invariant.
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
