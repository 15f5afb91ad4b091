use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),
    #[error("degenerate face {face}: edge lengths {lengths:?} violate the strict triangle inequality")]
    DegenerateFace { face: usize, lengths: [f64; 3] },
    #[error("surface is not orientable")]
    NonOrientable,
    #[error("face adjacency graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("surface has no boundary")]
    EmptyBoundary,
    #[error("boundary loop is not simple at vertex {0}")]
    NonSimpleBoundary(usize),
    #[error("surface has boundary")]
    HasBoundary,
    #[error("focal set is empty")]
    EmptyFocalSet,
    #[error("focal sets overlap or are too close: separation {separation} < {required}")]
    SeparationTooSmall { separation: f64, required: f64 },
    #[error("point {0} could not be located on the surface")]
    PointNotOnSurface(String),
    #[error("point lies in the focal set")]
    PointInFocalSet,
    #[error("direction resolution insufficient: A/B directions {gap} rad apart, threshold {threshold}")]
    ResolutionInsufficient { gap: f64, threshold: f64 },
    #[error("geodesic leaves the surface after {0} of requested length")]
    GeodesicExitsSurface(f64),
    #[error("sample sets do not match")]
    SampleMismatch,
    #[error("empty equidistant complex")]
    EmptyComplex,
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown scene `{0}`")]
    UnknownScene(String),
    #[error("mesh parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
