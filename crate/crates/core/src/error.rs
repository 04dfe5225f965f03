use thiserror::Error;

use crate::spectral::ResolutionReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("phase is singular at xi = 0")]
    SingularFrequency,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "phase increment {:.4} per cell exceeds 0.1 rad (t-resolution violated)",
        .0.max_phase_increment
    )]
    Resolution(ResolutionReport),

    #[error("draw covers k in [{draw_min}, {draw_max}] but decomposition needs [{need_min}, {need_max}]")]
    KRangeMismatch {
        draw_min: i32,
        draw_max: i32,
        need_min: i32,
        need_max: i32,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
