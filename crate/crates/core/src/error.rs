use thiserror::Error;

/// Errors raised by the geometry, solver and representation code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is not on the upper hyperboloid sheet (residual {residual:e})")]
    NotOnSheet { residual: f64 },

    #[error("vector is not tangent at its base point (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("tangent vector is not unit (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("ideal point is not lightlike or not future-pointing (residual {residual:e})")]
    NotLightlike { residual: f64 },

    #[error("ideal point is not normalized against the origin (<ray, o> = {value})")]
    NotNormalized { value: f64 },

    #[error("reflection normal is not a spacelike unit vector (<u,u> = {value})")]
    NotSpacelike { value: f64 },

    #[error("matrix is not in O(n,1) preserving the upper sheet (residual {residual:e})")]
    NotLorentz { residual: f64 },

    #[error("factor structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("measure is not barycenter-admissible: factor {factor} has an atom class carrying {fraction} of the mass")]
    Inadmissible { factor: usize, fraction: f64 },

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence { iterations: usize, gradient_norm: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("codimension-2 face has an ideal endpoint; its volume is infinite")]
    IdealFace,

    #[error("orbit ball is empty")]
    EmptyBall,

    #[error("orbit enumeration exceeded the element cap {cap}")]
    BallCapExceeded { cap: usize },

    #[error("too few orbit points ({found}) for a growth estimate")]
    TooFewOrbitPoints { found: usize },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("relator `{relator}` has residual {residual:e}")]
    RelatorFailure { relator: String, residual: f64 },

    #[error("reflection does not commute with the amalgamating subgroup (residual {residual:e})")]
    CommutationFailure { residual: f64 },

    #[error("element `{0}` is not hyperbolic")]
    NotHyperbolic(String),

    #[error("invalid triangulation: {0}")]
    Triangulation(String),

    #[error("star of face is incomplete: {0}")]
    IncompleteStar(String),

    #[error("could not find nondegenerate positions after {retries} retries (simplex {simplex})")]
    PositionsExhausted { retries: usize, simplex: usize },
}

impl Error {
    /// True for failures of a numerical procedure on valid input
    /// (non-convergence, degeneracy) as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Degenerate(_)
                | Error::BallCapExceeded { .. }
                | Error::TooFewOrbitPoints { .. }
                | Error::PositionsExhausted { .. }
                | Error::NotHyperbolic(_)
                | Error::IncompleteStar(_)
                | Error::IdealFace
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
