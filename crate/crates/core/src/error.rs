use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the configured bound {1}")]
    BoundExceeded(u64, u64),
    #[error("({q},{n}) is not a Dickson pair")]
    NotDicksonPair { q: u64, n: u64 },
    #[error("variant index {got} out of range (there are {count} isomorphism classes)")]
    VariantOutOfRange { got: usize, count: usize },
    #[error("zero has no discrete logarithm")]
    ZeroLog,
    #[error("subfield degree {d} does not divide extension degree {e}")]
    BadSubfieldDegree { d: u32, e: u32 },
    #[error("permutation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("the given set is not a subgroup")]
    NotSubgroup,
    #[error("group is intransitive")]
    Intransitive,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("trivial scheme: automorphism group is the full symmetric group")]
    TrivialScheme,
    #[error("{0}")]
    Precondition(String),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
