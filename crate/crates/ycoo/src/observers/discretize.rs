//! Bilinear (Tustin) discretization and discrete-time filter stepping.

use super::realize::StateSpace;
use crate::error::YcooError;
use nalgebra::{DMatrix, DVector};

/// Discretizes a continuous-time system with the bilinear transform at
/// sample time `ts`:
///
/// `M  = (I - ts/2 A)^{-1}`
/// `Ad = M (I + ts/2 A)`,  `Bd = M B ts`,  `Cd = C M`,  `Dd = D + ts/2 C M B`.
pub fn tustin(ss: &StateSpace, ts: f64) -> Result<StateSpace, YcooError> {
    assert!(ts > 0.0, "sample time must be positive");
    let n = ss.order();
    let i = DMatrix::<f64>::identity(n, n);
    let m = (&i - &ss.a * (ts / 2.0))
        .try_inverse()
        .ok_or(YcooError::SingularDiscretization)?;
    let ad = &m * (&i + &ss.a * (ts / 2.0));
    let bd = &m * &ss.b * ts;
    let cd = &ss.c * &m;
    let dd = &ss.d + &ss.c * &m * &ss.b * (ts / 2.0);
    Ok(StateSpace { a: ad, b: bd, c: cd, d: dd })
}

/// A discrete-time state-space filter with internal state.
#[derive(Clone, Debug)]
pub struct DiscreteFilter {
    sys: StateSpace,
    x: DVector<f64>,
}

impl DiscreteFilter {
    pub fn new(sys: StateSpace) -> Self {
        let n = sys.order();
        DiscreteFilter { sys, x: DVector::zeros(n) }
    }

    pub fn reset(&mut self) {
        self.x.fill(0.0);
    }

    pub fn order(&self) -> usize {
        self.sys.order()
    }

    /// Output for the current input, then state update.
    pub fn step(&mut self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.sys.ninputs(), "input dimension mismatch");
        let uv = DVector::from_column_slice(u);
        let y = &self.sys.c * &self.x + &self.sys.d * &uv;
        self.x = &self.sys.a * &self.x + &self.sys.b * &uv;
        y.as_slice().to_vec()
    }
}
