use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("objective `{name}` returned non-finite value {value} at {position:?}")]
    NonFiniteObjective {
        name: String,
        value: f64,
        position: Vec<f64>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
