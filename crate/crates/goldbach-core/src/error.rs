use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("sieve range ({lo}, {hi}] exceeds the cap {cap}")]
    SieveLimit { lo: u64, hi: u64, cap: u64 },

    #[error("window order violated: need U <= y <= N/2, got N={n}, y={y}, U={u}")]
    WindowOrder { n: u64, y: u64, u: u64 },

    #[error("shift scan over h={h} exceeds the cap {cap}")]
    ScanTooLarge { h: u64, cap: u64 },

    #[error("dissection requires 1 <= P <= Q/2 and Q > 2, got P={p}, Q={q}")]
    DissectionParams { p: f64, q: u64 },

    #[error("grid modulus M={m} too small: exact orthogonality needs M > {min}")]
    GridTooSmall { m: u64, min: u64 },

    #[error("representation count is zero; weighted ratio undefined")]
    ZeroCount,

    #[error("main term is zero for N={n}; asymptotic ratio undefined")]
    ZeroMainTerm { n: u64 },

    #[error("degenerate logarithm: need N, y, U >= 3, got N={n}, y={y}, U={u}")]
    DegenerateLog { n: u64, y: u64, u: u64 },

    #[error("prime cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
