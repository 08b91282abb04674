use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("array length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("interface constant sigma is undefined for the single-well potential")]
    SigmaUndefined,

    #[error("kink width is undefined because the potential vanishes at 0")]
    DegeneratePotential,

    #[error("invalid sharp state: {0}")]
    InvalidSharpState(String),

    #[error("closure constraint Gram matrix is singular (condition number {0:.3e})")]
    SingularGram(f64),

    #[error("closure correction Jacobian is ill-conditioned (condition number {0:.3e}); move the correction bumps")]
    IllConditionedJacobian(f64),

    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("junction patches overlap at eps = {eps}; use eps <= {max_eps:.4e}")]
    PatchOverlap { eps: f64, max_eps: f64 },

    #[error("grid too coarse: kink width 2*delta = {width:.4e} holds fewer than 8 points; use n_points >= {required}")]
    GridTooCoarse { width: f64, required: usize },

    #[error("no phase plateau wide enough for the volume correction bump")]
    NoPlateau,

    #[error("detected junctions overlap near arclength {0:.6}")]
    OverlappingDetections(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
