use thiserror::Error;

/// Failures surfaced by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonConvergence: {0}")]
    NonConvergence(String),

    #[error("BracketScanTooCoarse: sign structure in [{lo}, {hi}] not resolved by the scan grid")]
    BracketScanTooCoarse { lo: f64, hi: f64 },

    #[error("DegenerateProfile: |psi(M)| = {psi_at_m:e} at theta = {theta}")]
    DegenerateProfile { theta: f64, psi_at_m: f64 },

    #[error("SingularWronskian: |W| = {modulus:e}")]
    SingularWronskian { modulus: f64 },

    #[error("QuadratureFailure: refinement budget exhausted on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("OverflowGuard: Airy evaluation out of range at x = {x}")]
    OverflowGuard { x: f64 },

    #[error("NotAResonance: residual {residual:e} at theta = {theta}")]
    NotAResonance { theta: f64, residual: f64 },

    #[error("NotResonant: theta = {theta} is not in the resonant set")]
    NotResonant { theta: f64 },

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name, used by front ends when forwarding errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonConvergence(_) => "NonConvergence",
            Error::BracketScanTooCoarse { .. } => "BracketScanTooCoarse",
            Error::DegenerateProfile { .. } => "DegenerateProfile",
            Error::SingularWronskian { .. } => "SingularWronskian",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::OverflowGuard { .. } => "OverflowGuard",
            Error::NotAResonance { .. } => "NotAResonance",
            Error::NotResonant { .. } => "NotResonant",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
