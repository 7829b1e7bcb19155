use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sample array has {got} entries, grid expects {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field is not Hermitian-symmetric (imaginary residue {residue:e})")]
    NotHermitian { residue: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field is not solenoidal (relative divergence {defect:e})")]
    NotSolenoidal { defect: f64 },
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("empty sample sequence")]
    EmptySamples,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("blow-up at t = {time} (last good t = {last_good_time}): {reason}")]
    BlowUp {
        time: f64,
        last_good_time: f64,
        reason: String,
    },
    #[error("Galerkin basis too large: modes_per_axis = {modes} exceeds {limit}")]
    BasisTooLarge { modes: usize, limit: usize },
    #[error("Picard iteration diverged on [{start}, {end}] after {iterations} iterations")]
    PicardDivergence {
        start: f64,
        end: f64,
        iterations: usize,
    },
    #[error("sweep run for epsilon = {epsilon} failed: {source}")]
    SweepRun {
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },
}
