use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A value left the signed 64-bit range.
    #[error("arithmetic range exceeded while computing {0}")]
    Overflow(&'static str),

    /// A bound's constant term (a power of k) does not fit in 64 bits.
    #[error("constant {0} exceeds the 64-bit range (k must be at most 13)")]
    ConstantRange(String),

    #[error("integer sets must be nonempty")]
    EmptySet,

    #[error("duplicate element {0} in set input")]
    DuplicateElement(i64),

    #[error("invalid coefficient {0}: dilation factors must be nonzero")]
    ZeroCoefficient(i64),

    #[error("duplicate coefficient {0} in dilate specification")]
    DuplicateCoefficient(i64),

    #[error("dilate specification needs at least one coefficient")]
    NoCoefficients,

    #[error("invalid modulus {modulus}: {reason}")]
    InvalidModulus { modulus: i64, reason: &'static str },

    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),

    #[error("the given set is not a {modulus}-component of the ambient set")]
    NotAComponent { modulus: i64 },

    #[error("residue {residue} is outside [0, {modulus})")]
    InvalidResidue { residue: i64, modulus: i64 },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub fn is_range_error(&self) -> bool {
        matches!(self, Error::Overflow(_) | Error::ConstantRange(_))
    }
}
