use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no photon distribution exists for closed slits")]
    NoPhotonDistribution,

    #[error("no photon to observe: both slits closed")]
    NoPhotonToObserve,

    #[error("screen window too narrow: {outside_fraction:.4} of the probability mass falls outside")]
    ScreenWindowTooNarrow { outside_fraction: f64 },

    #[error("window of half-width {half_width} m holds less than one fringe period ({period} m)")]
    WindowTooSmall { half_width: f64, period: f64 },

    #[error("negative duration: {0} s")]
    NegativeDuration(f64),

    #[error(
        "insufficient samples: {samples} samples cannot fill {min_bins} bins at {min_expected} expected counts each"
    )]
    InsufficientSamples {
        samples: usize,
        min_bins: usize,
        min_expected: f64,
    },

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("protocol abort: no announcement for round {round}")]
    MissingAnnouncement { round: usize },

    #[error("too few trials: {got} (need at least {min})")]
    TooFewTrials { got: usize, min: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("insufficient ancilla dimension: rank {rank} exceeds dim_A {dim_a}")]
    InsufficientAncilla { rank: usize, dim_a: usize },

    #[error(
        "not equally concealing - Hughston theorem inapplicable (marginal trace distance {trace_distance:.3e} > {tol:.1e})"
    )]
    NotEquallyConcealing { trace_distance: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
