use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid exponent {name} = {value}: {reason}")]
    InvalidExponent {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index order violation: ({0}, {1})")]
    IndexOrder(usize, usize),

    #[error("three-index increment is not closed: |delta h| = {residual:e} exceeds {tolerance:e}")]
    NotClosed { residual: f64, tolerance: f64 },

    #[error("sewing requires mu > 1, got {0}")]
    MuTooSmall(f64),

    #[error("increment has nonzero consecutive entry at ({0}, {1})")]
    NotInC2Pi(usize, usize),

    #[error("grids are not nested: coarse point {0} is not a fine grid point")]
    GridsNotNested(f64),

    #[error("Hurst parameter {0} outside (1/3, 1/2]")]
    HurstOutOfRange(f64),

    #[error("refine factor {0} must be at least 4")]
    RefineFactor(usize),

    #[error("compensated Riemann sums did not converge by depth {depth} (last difference {difference:e})")]
    NoConvergence { depth: usize, difference: f64 },

    #[error("regularity budget violated: eta + gamma = {0} <= 1")]
    RegularityBudget(f64),

    #[error("derivative of the coefficient requested at the origin")]
    OriginDerivative,

    #[error("degenerate sampling: {0}")]
    DegenerateSampling(String),

    #[error("negative argument {0} where a non-negative value is required")]
    NegativeArgument(f64),

    #[error("coefficient is not integrable at the origin: {0}")]
    NonIntegrable(String),

    #[error("required step {required:e} is below the grid spacing {available:e} in shell q = {shell} at t = {time}")]
    StepUnderflow {
        shell: i32,
        time: f64,
        required: f64,
        available: f64,
    },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxSteps(usize),

    #[error("InsufficientShells: found {found}, need at least {required}")]
    InsufficientShells { found: usize, required: usize },

    #[error("window [{start}, {end}] overlaps the zero region starting at index {zero_index}")]
    WindowOverlapsZero {
        start: usize,
        end: usize,
        zero_index: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_positive_exponent(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
