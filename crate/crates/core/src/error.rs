use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate polyline: {0}")]
    DegeneratePolyline(String),

    #[error("degenerate axis on road {road}: zero length")]
    DegenerateAxis { road: String },

    #[error("offset of {distance} m collapsed on {context}: {removed} of {total} samples clipped")]
    OffsetCollapse {
        context: String,
        distance: f64,
        removed: usize,
        total: usize,
    },

    #[error("no fillet exists at {context}: {reason}")]
    NoFilletExists { context: String, reason: String },

    #[error("degenerate Bezier span: endpoints {0} m apart")]
    DegenerateSpan(f64),

    #[error("infeasible profile fit on {context}: {reason}")]
    InfeasibleFit { context: String, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("intersection {intersection} is not convex: {reason}")]
    NonConvexIntersection { intersection: String, reason: String },

    #[error("{lanes} lanes of width {lane_width} m do not fit in half-width {half_width} m of {link}")]
    LaneOverflow {
        link: String,
        lanes: usize,
        lane_width: f64,
        half_width: f64,
    },

    #[error("query ({x}, {y}) lies outside the heightfield")]
    OutOfBounds { x: f64, y: f64 },

    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error("missing georeference for {0}")]
    MissingGeoreference(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage: stage.into(),
                source: Box::new(e),
            },
        }
    }

    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::InfeasibleFit { .. } => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}
