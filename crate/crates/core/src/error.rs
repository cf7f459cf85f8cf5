use std::fmt;

/// Errors raised while building or evaluating a synchronization scenario.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Config(#[from] ConfigError),

    /// The closed-form reception model is being used outside its region of validity.
    #[error("model-validity error: {0}")]
    ModelValidity(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("alignment failure: at most {best_overlap} overlapping detections, {required} required")]
    Alignment { best_overlap: usize, required: usize },

    #[error("no valid detections in the acquisition window")]
    NoDetection,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A configuration problem, optionally tied to a line of a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    pub fn at_line(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error (line {line}): {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}
