use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chart `{chart}` is not an immersion at ({x1}, {x2})")]
    DegenerateChart { chart: String, x1: f64, x2: f64 },

    #[error("point ({x1}, {x2}) lies outside the domain of `{chart}`")]
    OutOfDomain { chart: String, x1: f64, x2: f64 },

    #[error("wrong geometry: {0}")]
    WrongGeometry(String),

    #[error("flat point: {0}")]
    FlatPoint(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("thickness too large: {0}")]
    ThicknessTooLarge(String),

    #[error("quadrature needs {required} nodes, cap is {cap}")]
    NodeCap { required: u64, cap: u64 },

    #[error("flow left the chart domain after {achieved} of {requested}")]
    DomainExit { achieved: f64, requested: f64 },

    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
