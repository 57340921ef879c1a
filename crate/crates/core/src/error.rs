use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric mismatch between operands")]
    MetricMismatch,
    #[error("basis {tag} is not defined for {space}")]
    UndefinedBasis { tag: String, space: String },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("point lies at the pole of stereographic projection")]
    Pole,
    #[error("point lies outside the domain: {0}")]
    Domain(String),
    #[error("matrix is not a group element (residual {residual:.3e})")]
    NotInGroup { residual: f64 },
    #[error("singular point at parameter ({u}, {v})")]
    SingularPoint { u: f64, v: f64 },
    #[error("umbilic points on grid: {0:?}")]
    Umbilic(Vec<(usize, usize)>),
    #[error("vector is not on the quadric (residual {0:.3e})")]
    OffQuadric(f64),
    #[error("vectors are not orthogonal (residual {0:.3e})")]
    NonOrthogonal(f64),
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("degenerate line: both representatives are point spheres")]
    DegenerateLine,
    #[error("sphere map is not tangent (residual {0:.3e})")]
    NotTangent(f64),
    #[error("frame fails the {order} condition (residual {residual:.3e})")]
    FrameOrder { order: &'static str, residual: f64 },
    #[error("form is not integrable (structure residual {0:.3e})")]
    NotIntegrable(f64),
    #[error("slice does not project immersively (min singular value {0:.3e})")]
    NotImmersive(f64),
    #[error("grids differ")]
    GridMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
