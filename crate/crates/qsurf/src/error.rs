use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate observation: adjusted observation has zero length")]
    DegenerateObservation,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("singular covariance matrix")]
    SingularCovariance,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("no trainable directions: all observations coincide with their point estimates")]
    NoTrainableDirections,
    #[error("training diverged: non-finite loss at epoch {epoch}")]
    TrainingDiverged { epoch: usize },
    #[error("unsupported dimension {0}: exact surface area is 2-D only")]
    UnsupportedDimension(usize),
    #[error("no quantile level matches coverage probability {0}")]
    MissingLevel(f64),
    #[error("quantile radii decrease across levels: contract violation")]
    CrossingRadii,
    #[error("config error: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
