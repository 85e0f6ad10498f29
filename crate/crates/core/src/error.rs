use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("axis pair must use two distinct axes, got {0:?} twice")]
    DegenerateAxisPair(crate::repgen::Axis),

    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("projection trace {trace} is not within 1e-6 of an integer")]
    NonIntegralTrace { trace: f64 },

    #[error("projection has {found} unit eigenvalues but trace rounds to {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error(
        "eigensolver did not converge for n = {n} after {iterations} sweeps \
         (‖M‖_F = {frobenius_norm:e}, unconverged subdiagonal {subdiagonal:e})"
    )]
    NonConvergence {
        n: usize,
        iterations: usize,
        frobenius_norm: f64,
        subdiagonal: f64,
    },

    #[error(
        "block structure violated at k = {k}: upper {upper:e}, hermiticity {hermiticity:e}, \
         zero block {zero_block:e}"
    )]
    StructureViolation {
        k: u32,
        upper: f64,
        hermiticity: f64,
        zero_block: f64,
    },

    #[error("the (+1,+1) diagonal block is empty at k = {k}")]
    EmptyBlock { k: u32 },

    #[error("generation {n} has 8^{n} cousin words, above the exact enumeration bound of {bound}")]
    EnumerationTooLarge { n: u32, bound: u64 },

    #[error("cannot parse word {input:?}: {reason}")]
    WordParse { input: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
