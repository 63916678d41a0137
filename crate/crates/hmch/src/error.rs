use crate::field::PeriodicField;

/// Errors raised by field construction, operators, and time integration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("field contains non-finite samples")]
    NonFiniteSamples,

    #[error("grid size {0} is below the minimum of 16")]
    GridTooSmall(usize),

    #[error("grid size {0} must be even")]
    OddGridSize(usize),

    #[error("spectrum is not Hermitian-symmetric; inverse transform would be complex")]
    NonHermitianSpectrum,

    #[error("derivative order {0} exceeds the supported maximum of 5")]
    UnsupportedDerivativeOrder(u32),

    #[error("inverse-operator derivative order {0} must lie in 0..=3")]
    InverseDerivativeOrder(u32),

    #[error("L^p exponent {0} must be >= 1 (or infinity)")]
    InvalidLpExponent(f64),

    #[error("mollifier width {0} must lie in (0, 1]")]
    InvalidMollifierWidth(f64),

    #[error("grid of {grid} points cannot resolve mode {mode}")]
    UnresolvedMode { mode: u32, grid: usize },

    #[error("peakon wave speed {0} must be positive")]
    NonPositiveWaveSpeed(f64),

    #[error("decay fit needs at least 3 modes, got {0}")]
    TooFewModes(usize),

    #[error("Sobolev index s={s} must exceed (1+sigma)/2 with sigma={sigma}")]
    RateOutOfRange { s: f64, sigma: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "time step {dt} violates the advective CFL guard {limit} \
         (pass the unstable-dt override to proceed anyway)"
    )]
    CflViolation { dt: f64, limit: f64 },

    #[error("solution blew up at t = {time}")]
    BlowUp {
        time: f64,
        last_state: Box<PeriodicField>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
