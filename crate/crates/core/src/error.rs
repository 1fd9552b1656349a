//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),
    #[error("unknown shape tag `{0}`")]
    UnknownShape(String),
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("mask has length {got}, expected {expected}")]
    MaskLength { expected: usize, got: usize },
    #[error("field has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field lives on the {found} samples, expected {expected}")]
    SupportMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("non-finite field value at index {0}")]
    NonFinite(usize),
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("delta {delta} is below the boundary resolution {resolution}")]
    DeltaBelowResolution { delta: f64, resolution: f64 },
    #[error("radii or delta sequence must be strictly decreasing")]
    NotDecreasing,
    #[error("no radii in the valid range [{lo}, {hi}]")]
    NoValidRadii { lo: f64, hi: f64 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("interior sample {0} is not covered by any ball")]
    UncoveredSample(usize),
    #[error("invalid layer range [{rho1}, {rho2})")]
    InvalidLayer { rho1: f64, rho2: f64 },
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("mask has zero total weight")]
    ZeroWeight,
    #[error("need at least two masked points")]
    SingletonMask,
    #[error("K_max must be at least 2, got {0}")]
    KMaxTooSmall(usize),
    #[error("boundary point {0} has no admissible radius at this mesh")]
    Unresolvable(usize),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
