use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate coordinate axis ({axis}): zero spread across {n} points")]
    DegenerateAxis { axis: char, n: usize },

    #[error("voxels do not form a regular lattice: {0}")]
    NonLattice(String),

    #[error("duplicate coordinates at voxel indices {0} and {1}")]
    DuplicateCoords(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix factorization failed ({context}) even after jitter")]
    Singular { context: String },

    #[error("dense operation rejected: n={n} exceeds configured limit {limit}")]
    DenseLimitExceeded { n: usize, limit: usize },

    #[error("region {region} has {reason}; pool regions or supply labeled voxels for both regions")]
    DegenerateRegion { region: u8, reason: String },

    #[error("isolated voxel {0}: all CAR weights are zero under the distance cutoff")]
    IsolatedVoxel(usize),

    #[error("{path}: row {row}: {msg}")]
    MalformedRow {
        path: String,
        row: usize,
        msg: String,
    },

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    ConfigValidation(Vec<String>),

    #[error("sampler aborted: {0}")]
    SamplerAbort(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
}

impl Error {
    /// Short machine-readable category slug, used by the CLI exit path.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::DegenerateAxis { .. } => "degenerate-axis",
            Error::NonLattice(_) => "non-lattice",
            Error::DuplicateCoords(..) => "duplicate-coords",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::Singular { .. } => "singular-matrix",
            Error::DenseLimitExceeded { .. } => "dense-limit",
            Error::DegenerateRegion { .. } => "degenerate-region",
            Error::IsolatedVoxel(_) => "isolated-voxel",
            Error::MalformedRow { .. } => "malformed-row",
            Error::ConfigValidation(_) => "config-invalid",
            Error::SamplerAbort(_) => "sampler-abort",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
