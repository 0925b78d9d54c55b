use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("grid too small: |psi| = {magnitude:e} at the boundary (limit {limit:e})")]
    BoundaryViolation { magnitude: f64, limit: f64 },

    #[error("wraparound detected after spectral propagation: |psi| = {magnitude:e} at the boundary")]
    Wraparound { magnitude: f64 },

    #[error("closed-form propagation requires a t=0 initial state")]
    NotInitialState,

    #[error("field is not a closed-form two-Gaussian state")]
    NotAnalytic,

    #[error("grids or time stamps of the two operands differ")]
    GridMismatch,

    #[error("no interference: found {found} dark fringe(s) in window, need at least 2")]
    NoInterference { found: usize },

    #[error("extremum detection failed: {0}")]
    ExtremumDetection(&'static str),

    #[error("both branches have zero norm")]
    FullyAbsorbed,

    #[error("conditional distribution for branch {branch} has zero surviving flux")]
    ZeroSurvivingFlux { branch: char },

    #[error("frame constraint unsatisfiable: c1*c2 = {product} exceeds |a||b| = {bound}")]
    Unsatisfiable { product: f64, bound: f64 },

    #[error("frame sampling failed after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("theorem check failed at trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("Gram matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("lens is not placed at the field's time: field t = {field_time}, object distance = {object_distance}")]
    LensPlacement { field_time: f64, object_distance: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Core module that raises this kind of error.
    pub fn origin(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "config",
            Error::BoundaryViolation { .. }
            | Error::Wraparound { .. }
            | Error::NotInitialState
            | Error::NotAnalytic
            | Error::GridMismatch => "wavepacket",
            Error::NoInterference { .. } | Error::ExtremumDetection(_) | Error::ZeroSurvivingFlux { .. } => "metrics",
            Error::FullyAbsorbed => "spin",
            Error::Unsatisfiable { .. } | Error::SamplingExhausted { .. } | Error::Trial { .. } => "frame",
            Error::IllConditioned { .. } | Error::LensPlacement { .. } => "optics",
        }
    }

    /// True for errors caused by the input values rather than by a stage
    /// of the pipeline.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }
}
