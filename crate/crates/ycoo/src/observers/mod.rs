//! Discrete-time observer implementations: state-space realization,
//! bilinear discretization, the blended three-observer bank, and the
//! baseline gain-scheduled Luenberger observer.

pub mod bank;
pub mod discretize;
pub mod luenberger;
pub mod realize;

pub use bank::{select_weights, wrap_deg, BankStep, YcooBank};
pub use discretize::{tustin, DiscreteFilter};
pub use luenberger::{
    in_region, select_gain, verify_gain_stability, GainStabilityReport, LuenbergerObserver,
};
pub use realize::{realize, StateSpace};
