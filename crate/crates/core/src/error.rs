use thiserror::Error;

/// Errors raised when constructing model objects or calling solvers with
/// arguments outside their domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("grid size must be odd and at least 3, got {0}")]
    InvalidGridSize(usize),

    #[error("tabulated cost: {0}")]
    InvalidCostTable(String),

    #[error("displacement samples must be strictly ascending within [0, 1] with at least two points")]
    InvalidSamples,

    #[error("`{c_tilde}` does not cost-dominate `{c}`")]
    NotCostDominant { c_tilde: String, c: String },

    #[error("table length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("share {0} is not a grid point")]
    OffGrid(f64),
}

pub type Result<T> = std::result::Result<T, ModelError>;
