use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulation order {0} (expected 4, 16 or 64)")]
    UnsupportedModulation(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("channel matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("channel contains a non-finite coefficient")]
    NonFinite,

    #[error("rank-deficient channel: |r({index},{index})| = {value:e}")]
    RankDeficient { index: usize, value: f64 },

    #[error("brute-force search space of {candidates} candidates exceeds the cap of {cap}")]
    SearchSpaceTooLarge { candidates: u128, cap: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("SNR grids do not match")]
    GridMismatch,

    #[error("no records to write")]
    EmptyRecords,

    #[error("malformed CSV: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
