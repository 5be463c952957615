use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "truncation too small: {n_trunc} levels leave tail mass {tail:.3e} (limit {limit:.1e})"
    )]
    TruncationTooSmall {
        n_trunc: usize,
        tail: f64,
        limit: f64,
    },

    #[error("state norm {norm} exceeds 1 + 1e-9")]
    NormTooLarge { norm: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} outside the domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("non-positive frequency {omega} at t = {t}")]
    NonPositiveFrequency { t: f64, omega: f64 },

    #[error("overdamped regime: 4 omega0^2 = {four_w2} <= gamma^2 = {g2}")]
    Overdamped { four_w2: f64, g2: f64 },

    #[error("Hermite recurrence limited to n <= {max}, requested {n}")]
    HermiteOrder { n: usize, max: usize },

    #[error("vacuum: Mandel Q undefined")]
    VacuumMandel,

    #[error("empty series")]
    EmptySeries,

    #[error("grid resolution {nx}x{ny} below the 2x2 minimum")]
    GridResolution { nx: usize, ny: usize },

    #[error("grid mismatch: grid is {grid:?}, samples are {samples:?}")]
    GridMismatch {
        grid: (usize, usize),
        samples: (usize, usize),
    },

    #[error("ODE step size underflow at t = {t} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("ODE step limit {max_steps} reached at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("norm drift {drift:.3e} at t = {t} exceeds {limit:.1e}")]
    NormDrift { t: f64, drift: f64, limit: f64 },

    #[error(
        "support reached truncation boundary at t = {t}: top-level population {population:.3e}"
    )]
    TruncationBoundary { t: f64, population: f64 },

    #[error("time {t} not covered by solution on [{lo}, {hi}]")]
    NotCovered { t: f64, lo: f64, hi: f64 },
}
