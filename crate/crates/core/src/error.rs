use thiserror::Error;

/// Errors raised by the library. All of them are domain errors (CLI exit code 1).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("a colored word of length {0} is required for matched classes")]
    MissingWord(usize),
    #[error("input is not noncrossing")]
    Crossing,
    #[error("singular Gram matrix: dimension {dim}, rank {rank}")]
    SingularGram { dim: usize, rank: usize },
    #[error("size guard `{guard}` exceeded: {value} > {limit}")]
    SizeGuard {
        guard: &'static str,
        value: u128,
        limit: u128,
    },
    #[error("tangle is not planar: {0}")]
    NonPlanar(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(name: &'static str, value: u128, limit: u128) -> Result<()> {
    if value > limit {
        Err(Error::SizeGuard {
            guard: name,
            value,
            limit,
        })
    } else {
        Ok(())
    }
}
