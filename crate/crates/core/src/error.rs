use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is reducible: {witness}")]
    Reducible { witness: String },
    #[error("no irreducibility certificate found (degree > 4, no inert prime <= 1000)")]
    IrreducibilityUndetermined,
    #[error("equation order is not maximal at p = {0}; field rejected")]
    NonMonogenicAtP(u64),
    #[error("p = {0} divides the index of the equation order")]
    IndexDivisor(u64),
    #[error("cannot factor discriminant remainder {0}")]
    DiscriminantTooLarge(String),

    #[error("enumeration up to {limit} exceeds the memory budget of {budget} ideals")]
    LimitTooLarge { limit: u64, budget: usize },
    #[error("ideal does not belong to this table's field")]
    FieldMismatch,
    #[error("norm arithmetic overflowed 64 bits")]
    NormOverflow,
    #[error("{0} is not a fundamental discriminant")]
    NotFundamentalDiscriminant(i64),
    #[error("{0} is not the discriminant of an imaginary quadratic field")]
    NotImaginaryQuadratic(i64),

    #[error("table limit {have} is too small (need at least {need})")]
    TableTooSmall { need: u64, have: u64 },
    #[error("residue estimate requested for degree-one field by a method that needs degree >= 2")]
    DegreeOne,
    #[error("user-supplied residue {0} must be positive and finite")]
    InvalidUserResidue(f64),
    #[error("Siegel policy assumes no exceptional zero; beta0 data missing")]
    MissingBeta0Data,

    #[error("parameters must satisfy 1 <= w < y <= x <= table limit")]
    ParamOrder,
    #[error("alpha = {0} is outside (1/2, 1)")]
    AlphaOutOfRange(f64),
    #[error("exponent a = {0} is outside the admissible range")]
    AOutOfRange(f64),
    #[error("modulus ideal must be squarefree")]
    RNotSquarefree,
    #[error("check is only defined under the no-exceptional-zero policy")]
    SiegelConfigured,
    #[error("all residuals vanish; no trend to fit")]
    DegenerateResiduals,
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),

    #[error("cache file is missing for this polynomial and limit")]
    MissingCache,
    #[error("cache file does not match the requested table: {0}")]
    CacheMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed cache record: {0}")]
    CacheFormat(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
