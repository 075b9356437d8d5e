use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential specification: {0}")]
    InvalidPotential(String),

    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),

    #[error("operation requires a radial potential, got family `{0}`")]
    NonRadial(String),

    #[error("eikonal slowness 1 + p/lambda = {value:.6e} is not positive at r = {radius:.6} (lambda = {lambda})")]
    NonPositiveSlowness { radius: f64, value: f64, lambda: f64 },

    #[error("grid does not contain the origin as a node")]
    OriginNotOnGrid,

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid under-resolves the wavelength at lambda = {lambda}: {points_per_wavelength:.2} points per wavelength (at least 10 required)")]
    UnderResolved {
        lambda: f64,
        points_per_wavelength: f64,
    },

    #[error("Krylov iteration did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("Krylov iteration broke down at iteration {0}")]
    Breakdown(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("support of {0} reaches the untrusted wall layer")]
    SupportTouchesWall(String),

    #[error("annuli outside the sampled range: {0}")]
    AnnuliOutOfRange(String),

    #[error("missing field `{0}`")]
    MissingField(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing curve `{0}`")]
    MissingCurve(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
