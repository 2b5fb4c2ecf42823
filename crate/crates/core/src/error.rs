use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty range")]
    EmptyRange,

    #[error("not a probability: {0}")]
    NotAProbability(String),

    #[error("binomial coefficient needs k <= n, got n={n}, k={k}")]
    BinomialRange { n: u64, k: u64 },

    #[error("polynomials live over different fields")]
    MismatchedField,

    #[error("division by zero polynomial")]
    DivisionByZero,

    #[error("nothing to factor")]
    NothingToFactor,

    #[error("equal-degree splitting gave up after {0} attempts")]
    SplittingStalled(usize),

    #[error("modulus {0} is reducible")]
    ReducibleModulus(String),

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("order Z[x]/({f}) is not maximal at {p} and no override is given")]
    DedekindFailure { f: String, p: String },

    #[error("splitting at {0} unavailable; supply an override")]
    SplittingUnavailable(String),

    #[error("bad field description: {0}")]
    BadFieldFile(String),

    #[error("bad override: {0}")]
    BadOverride(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("rank {rank} out of range: only {count} ideals of that norm")]
    RankOutOfRange { rank: String, count: String },

    #[error("cannot factor {0}: composite cofactor beyond trial-division range")]
    CannotFactor(String),

    #[error("sampler failed to accept after {0} rounds")]
    SamplerStalled(u64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
