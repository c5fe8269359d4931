//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum YcooError {
    #[error("dimension mismatch in {context}")]
    DimensionMismatch { context: &'static str },

    #[error("matrix is singular (determinant numerator vanishes)")]
    SingularMatrix,

    #[error("frequency-response evaluation at a pole (omega = {omega} rad/s)")]
    EvaluationAtPole { omega: f64 },

    #[error("plant is rank deficient")]
    RankDeficientPlant,

    #[error("observer transfer matrix has an improper entry ({i},{j}): numerator degree {num_deg} exceeds denominator degree {den_deg}")]
    ImproperEntry {
        i: usize,
        j: usize,
        num_deg: usize,
        den_deg: usize,
    },

    #[error("no |T_y| = |S_y| crossing found in [1e-1, 1e5] rad/s for channel {channel}")]
    NoCrossover { channel: usize },

    #[error("discretization transform is singular (I - Ts/2 A not invertible)")]
    SingularDiscretization,

    #[error("simulation diverged at t = {t} s: state magnitude exceeded 1e6")]
    Divergence { t: f64 },

    #[error("frozen design data failed the self-check: {detail}")]
    FrozenDataMismatch { detail: String },

    #[error("invalid configuration: {detail}")]
    InvalidConfig { detail: String },

    #[error("unknown scenario kind: {name}")]
    UnknownScenario { name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
