use thiserror::Error;

/// Failures reported by the spectral engine.
///
/// Variants fall in two families: input the caller must change (malformed or
/// unrealizable data, I/O) and numerical conditions detected while computing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cancellation pole: |k_{channel} + i kappa_{channel}| = {distance:.3e} below tolerance")]
    CancellationPole { channel: usize, distance: f64 },

    #[error("degenerate leading form: eliminated polynomial vanishes identically or lost its degree")]
    DegenerateLeadingForm,

    #[error("chain breakdown while recovering k_{channel}: |P| = {magnitude:.3e}")]
    ChainBreakdown { channel: usize, magnitude: f64 },

    #[error("unpaired complex zero at k1 = {re:.6e} + {im:.6e}i")]
    UnpairedComplexZero { re: f64, im: f64 },

    #[error("threshold-critical: eigenvalue {value:.3e} of B(0) is numerically zero")]
    ThresholdCritical { value: f64 },

    #[error("near-degenerate denominator {magnitude:.3e} for level {level}, channel {channel}")]
    NearDegenerateDenominator {
        level: usize,
        channel: usize,
        magnitude: f64,
    },

    #[error("non-real alpha: imaginary parts ({im1:.3e}, {im2:.3e}) exceed tolerance")]
    NonRealAlpha { im1: f64, im2: f64 },

    #[error("pairing failure: no k2 candidate satisfies the threshold identity")]
    PairingFailure,

    #[error("no admissible beta for the requested bound state")]
    NoAdmissibleBeta,

    #[error("singular factorization solution at r = {r}")]
    SingularFactorizationSolution { r: f64 },

    #[error("energy {energy} lies within tolerance of threshold {threshold}")]
    ThresholdProximity { energy: f64, threshold: f64 },

    #[error("Jost matrix singular at real energy {energy}")]
    JostSingular { energy: f64 },

    #[error("restriction violated: {0}")]
    Restriction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::CancellationPole { .. } => "cancellation_pole",
            Error::DegenerateLeadingForm => "degenerate_leading_form",
            Error::ChainBreakdown { .. } => "chain_breakdown",
            Error::UnpairedComplexZero { .. } => "unpaired_complex_zero",
            Error::ThresholdCritical { .. } => "threshold_critical",
            Error::NearDegenerateDenominator { .. } => "near_degenerate_denominator",
            Error::NonRealAlpha { .. } => "non_real_alpha",
            Error::PairingFailure => "pairing_failure",
            Error::NoAdmissibleBeta => "no_admissible_beta",
            Error::SingularFactorizationSolution { .. } => "singular_factorization_solution",
            Error::ThresholdProximity { .. } => "threshold_proximity",
            Error::JostSingular { .. } => "jost_singular",
            Error::Restriction(_) => "restriction",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// True for errors caused by the caller's data rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Restriction(_)
                | Error::NonRealAlpha { .. }
                | Error::NoAdmissibleBeta
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
