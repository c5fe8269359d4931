//! Polynomial, rational-function, and rational transfer-matrix arithmetic
//! with numerically tolerant canonicalization.

pub mod matrix;
pub mod poly;
pub mod rational;

pub use matrix::TransferMatrix;
pub use poly::{poly_gcd, Polynomial};
pub use rational::{rat_canonicalize, RationalFunction};
