use thiserror::Error;

/// Errors shared by every module of the library.
///
/// All arithmetic is fail-closed: anything that cannot be answered exactly at
/// the stated precision is an error, never a guess.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("{0} is not prime")]
    NotAPrime(u64),

    #[error("not a unit: valuation is at least 1")]
    NotAUnit,

    #[error("character value must lie in 1 + {q}Z_p")]
    NotPrincipalUnit { q: u64 },

    #[error("insufficient precision: zero mod p^{precision}")]
    InsufficientPrecision { precision: u32 },

    #[error("truncation too short: need at least {needed} coefficients, have {truncation}")]
    TruncationTooShort { needed: usize, truncation: usize },

    #[error("matrix is not square or is empty: {rows} rows, row {offending} has {cols} entries")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        offending: usize,
    },

    #[error("module has free rank {rank} > 0, no characteristic polynomial")]
    NotTorsion { rank: u32 },

    #[error("mu-invariant is {mu} > 0; twisting is defined only for mu = 0")]
    MuNonzero { mu: u32 },

    #[error("character is trivial")]
    TrivialCharacter,

    #[error("coinvariants are not finite")]
    NotFinite,

    #[error("operation requires exact integer coefficients")]
    ExactCoefficientsRequired,

    #[error("operation requires coefficients reduced mod p^M")]
    ModularCoefficientsRequired,

    #[error("group ring parameters differ: ({pl}, {nl}, {ml}) vs ({pr}, {nr}, {mr})")]
    LevelMismatch {
        pl: u64,
        nl: u32,
        ml: u32,
        pr: u64,
        nr: u32,
        mr: u32,
    },

    #[error("level is already 0, cannot restrict further")]
    LevelZero,

    #[error("coefficient exponent is already 1, cannot reduce further")]
    ExponentFloor,

    #[error("size limit exceeded: {what} = {value} > {limit}")]
    SizeLimit {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("degrees of primes above p sum to {sum}, field degree is {degree}")]
    DegreeMismatch { sum: u32, degree: u32 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("form `{form}` has no local data for prime `{prime}`")]
    MissingLocalData { form: String, prime: String },

    #[error("prime `{prime}` is declared with conflicting decomposition kinds")]
    InconsistentLocalData { prime: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
