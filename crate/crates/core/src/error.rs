use thiserror::Error;

/// Errors produced by the library. Violations found by
/// [`crate::environment::validate`] are data, not errors; they only become
/// an [`Error::InvalidScenario`] when a load or a run refuses to proceed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown scenario id `{0}` (valid ids: env1, env2)")]
    UnknownScenario(String),

    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("optimizer diverged at iteration {iteration} (last finite J = {last_finite})")]
    Diverged { iteration: usize, last_finite: f64 },

    #[error("fleet selection needs at least one building")]
    NoBuildings,

    #[error("fleet selection supports at most {max} drones, scenario has {got}")]
    TooManyDrones { got: usize, max: usize },

    #[error("buildings {first} and {second} both round to cell ({col}, {row})")]
    CellCollision {
        first: usize,
        second: usize,
        col: usize,
        row: usize,
    },

    #[error("{what} at ({x}, {y}) lies outside the non-negative grid")]
    OffGrid { what: String, x: f64, y: f64 },

    #[error(
        "joint action table needs {needed} actions per state ({actions}^{agents}), \
         over the budget of {budget}; joint tables grow exponentially with agent count"
    )]
    TableBudget {
        needed: u128,
        actions: usize,
        agents: usize,
        budget: u128,
    },

    #[error("state key does not fit in 128 bits ({0})")]
    StateKeyOverflow(String),

    #[error("{method}: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed report: {0}")]
    Report(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
