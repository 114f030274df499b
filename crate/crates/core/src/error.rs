use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("matrix is not skew-symmetric (max |A + A^T| entry = {max_asym:e})")]
    NotSkew { max_asym: f64 },

    #[error("matrix is not a rotation (orthogonality defect {defect:e}, det {det})")]
    NotOrthogonal { defect: f64, det: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("an action needs at least one generator")]
    EmptyGenerators,

    #[error("point orbit has no second fundamental form")]
    PointOrbit,

    #[error("point is not regular: orbit dimension {orbit_dim} below maximum {max_dim}")]
    NotRegular { orbit_dim: usize, max_dim: usize },

    #[error("vector has a tangential component of norm {norm:e}")]
    TangentialComponent { norm: f64 },

    #[error(
        "ambiguous clustering: separation {separation:e} lies in [tol, 2 tol] with tol = {tol:e}; adjust the clustering tolerance"
    )]
    ClusterAmbiguity { separation: f64, tol: f64 },

    #[error("shape operators do not commute (residual {residual:e})")]
    NonCommuting { residual: f64 },

    #[error("group enumeration exceeded cap ({cap})")]
    GroupCapExceeded { cap: usize },

    #[error("no focal hyperplanes to generate a reflection group")]
    EmptyHyperplanes,

    #[error("tangent assembly has rank {rank} < {expected} at sample {sample} (profile tangent to an orbit direction)")]
    TangentRankDeficient { sample: usize, rank: usize, expected: usize },

    #[error("profile is not invariant under the Weyl group (max deviation {deviation:e})")]
    NotWeylInvariant { deviation: f64 },

    #[error("odd derivative of order {order} does not vanish at the wall ({value:e})")]
    NotEven { order: usize, value: f64 },

    #[error("warping function not realizable: axis distance / rho mismatch {mismatch:e} at node {node}")]
    Unrealizable { node: usize, mismatch: f64 },

    #[error("chart is not an immersion at node {node} (min singular value {min_sv:e})")]
    NotImmersed { node: usize, min_sv: f64 },

    #[error("closed chart endpoints differ by {gap:e}")]
    NotClosed { gap: f64 },

    #[error("finite-difference stencil leaves the chart domain on axis {axis}")]
    StencilOutsideDomain { axis: usize },

    #[error("degenerate tangents at parameter {params:?}")]
    DegenerateTangents { params: Vec<f64> },

    #[error("graph extraction failed: {0}")]
    GraphExtraction(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
