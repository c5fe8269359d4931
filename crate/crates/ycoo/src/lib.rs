//! Vehicle-motion observer suite built on Youla-parameterized controller
//! output observation: rational transfer-function algebra, a kinematic
//! bicycle model, observer synthesis, discrete-time observer banks, and a
//! simulation/evaluation harness.

pub mod cli;
pub mod design;
pub mod error;
pub mod frozen;
pub mod metrics;
pub mod observers;
pub mod plot;
pub mod ratfun;
pub mod sim;
pub mod vehicle;
