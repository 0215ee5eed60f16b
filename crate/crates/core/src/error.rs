use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters or a signal description violate their stated invariants.
    #[error("invalid specification: {0}")]
    Specification(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// The reference signal is constant, so the PSNR peak `max - min` is zero.
    #[error("PSNR undefined: reference signal has zero dynamic range")]
    PsnrUndefined,

    #[error("degree d[{index}] = {value} is not positive")]
    SingularDegree { index: usize, value: f64 },

    #[error("refusing to materialize a dense {n}x{n} matrix (limit {limit})")]
    Size { n: usize, limit: usize },

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error(transparent)]
    Breakdown(#[from] crate::cg::Breakdown),
}
