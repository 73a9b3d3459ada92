use thiserror::Error;

use crate::qpm::Intersection;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {iterations} iterations, bracket [{lo}, {hi}]")]
    NonConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("quadrature did not converge within {panels} panels (error estimate {estimate:e})")]
    QuadratureNonConvergence { panels: usize, estimate: f64 },

    #[error("wavelength {lambda_um} µm outside valid range [{lo}, {hi}] µm of {model}")]
    OutOfRange { model: String, lambda_um: f64, lo: f64, hi: f64 },

    #[error("mode {mode} is not guided at λ = {lambda_um} µm")]
    ModeCutoff { mode: String, lambda_um: f64 },

    #[error("mode solver failed for {mode}: bracket [{lo}, {hi}]")]
    SolverFailure { mode: String, lo: f64, hi: f64 },

    #[error("phase mismatch {delta_beta} rad/µm is not positive; first-order QPM impossible")]
    NonPositiveMismatch { delta_beta: f64 },

    #[error("period curves do not intersect in [{lo}, {hi}] µm")]
    NoIntersection { lo: f64, hi: f64 },

    #[error("period curves intersect {} times", .0.len())]
    MultipleIntersections(Vec<Intersection>),

    #[error("the two processes are identical; every point is an intersection")]
    IdenticalProcesses,

    #[error("no tangency found for geometry in [{lo}, {hi}]")]
    NoTangency { lo: f64, hi: f64 },

    #[error("chirp rate undefined: {0}")]
    UniformDegenerate(String),

    #[error("state lacks the signal/idler-swapped partner channel")]
    MissingSwappedChannel,

    #[error("frequency grid is not symmetric about the degenerate frequency")]
    AsymmetricGrid,

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("visibility undefined: {0}")]
    UndefinedVisibility(String),

    #[error("polarization analysis requires a Type-II state")]
    NotTypeII,

    #[error("interaction {interaction} not cataloged for material {material}")]
    UnknownInteraction { material: String, interaction: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Overflow(_) => "overflow",
            Error::NoSignChange { .. } => "no-sign-change",
            Error::NonConvergence { .. } => "non-convergence",
            Error::QuadratureNonConvergence { .. } => "quadrature-non-convergence",
            Error::OutOfRange { .. } => "out-of-range",
            Error::ModeCutoff { .. } => "mode-cutoff",
            Error::SolverFailure { .. } => "solver-failure",
            Error::NonPositiveMismatch { .. } => "non-positive-mismatch",
            Error::NoIntersection { .. } => "no-intersection",
            Error::MultipleIntersections(_) => "multiple-intersections",
            Error::IdenticalProcesses => "identical-processes",
            Error::NoTangency { .. } => "no-tangency",
            Error::UniformDegenerate(_) => "uniform-degenerate",
            Error::MissingSwappedChannel => "missing-swapped-channel",
            Error::AsymmetricGrid => "asymmetric-grid",
            Error::EmptySpectrum => "empty-spectrum",
            Error::UndefinedVisibility(_) => "undefined-visibility",
            Error::NotTypeII => "not-type-ii",
            Error::UnknownInteraction { .. } => "unknown-interaction",
            Error::Invalid(_) => "invalid",
        }
    }
}
