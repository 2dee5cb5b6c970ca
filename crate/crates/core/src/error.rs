use std::path::PathBuf;

/// Errors produced by the segmentation toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid raster: {width}x{height} with {len} samples (expected {expected})")]
    InvalidRaster {
        width: usize,
        height: usize,
        len: usize,
        expected: usize,
    },

    #[error("size mismatch: {left:?} vs {right:?}")]
    SizeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no background")]
    NoBackground,

    #[error("image {id}: no background")]
    NoBackgroundIn { id: String },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("contour shorter than 2k+1 ({len} points, k = {k})")]
    ContourTooShort { len: usize, k: usize },

    #[error("insufficient points: {got} < {need}")]
    InsufficientPoints { got: usize, need: usize },

    #[error("degenerate configuration")]
    DegenerateConfiguration,

    #[error("not an ellipse")]
    NotAnEllipse,

    #[error("degenerate conic")]
    DegenerateConic,

    #[error("class distribution must contain at least one class with a positive count")]
    EmptyDistribution,

    #[error("duplicate class name: {0}")]
    DuplicateClass(String),

    #[error("class {0} has zero samples")]
    ZeroCount(String),

    #[error("unknown class: {0}")]
    UnknownClass(String),

    #[error("probability out of domain (0, 1]: {0}")]
    ProbabilityDomain(f64),

    #[error("ground truth and predictions disagree on contours: {0:?}")]
    OrphanContours(Vec<String>),

    #[error("could not place scene after {0} attempts")]
    PlacementFailed(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
