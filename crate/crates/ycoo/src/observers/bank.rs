//! The three-observer bank: discrete-time observer filters sharing one
//! nonlinear internal vehicle model, blended by heading-scheduled weights.
//!
//! All three filters integrate the same innovation at every step (so a
//! filter taking over is already warm), their control estimates are blended
//! with published error-based weights, and the blended input drives the
//! internal model. Because the state estimate is read from the single shared
//! model, handoffs cannot introduce state-estimate discontinuities.

use super::discretize::{tustin, DiscreteFilter};
use super::realize::realize;
use crate::design::design;
use crate::error::YcooError;
use crate::frozen::{frozen_data, FrozenData};
use crate::vehicle::{integrate_step, ControlInput, VehicleParams, VehicleState};

/// Limit on the steering estimate fed to the internal model (rad).
///
/// Two reasons. First, the bicycle model's `tan` blows up (and wraps sign)
/// outside +-pi/2, so transient filter outputs must be confined to a
/// physically meaningful range. Second, the lateral filter differentiates
/// position noise twice, so its raw output under measurement noise is far
/// larger than any real steering angle; an overly generous clamp lets the
/// saturated steering jitter rectify (through the slip angle) into a speed
/// estimation bias. 20 degrees is the steering range the scenarios and the
/// design operating envelope actually use.
pub const DELTA_F_LIMIT: f64 = 20.0 * std::f64::consts::PI / 180.0;

/// Physical limit on the acceleration estimate (m/s^2).
pub const ACCEL_LIMIT: f64 = 10.0;

/// Wraps an angle in degrees to `[0, 360)`.
pub fn wrap_deg(psi_deg: f64) -> f64 {
    let w = psi_deg.rem_euclid(360.0);
    if w == 360.0 {
        0.0
    } else {
        w
    }
}

/// Blending weights of the three observers at the given heading.
///
/// Inside an overlap window the published error tables set the weights;
/// outside, the single responsible observer carries weight one. The weight
/// vector always sums to one.
pub fn select_weights(psi_deg: f64, data: &FrozenData) -> [f64; 3] {
    let psi = wrap_deg(psi_deg);
    // Overlap windows (from, to, table index): [50,70] 1->2, [170,190] 2->3,
    // [290,310] 3->1.
    let windows = [(0usize, 1usize), (1, 2), (2, 0)];
    for (tbl_idx, &(from, to)) in windows.iter().enumerate() {
        let t = &data.blend_tables[tbl_idx];
        let lo = t.psi_deg[0];
        let hi = *t.psi_deg.last().unwrap();
        if psi >= lo && psi <= hi {
            let wf = t.weight_from(psi);
            let mut w = [0.0; 3];
            w[from] = wf;
            w[to] = 1.0 - wf;
            return w;
        }
    }
    let mut w = [0.0; 3];
    if psi > 70.0 && psi < 170.0 {
        w[1] = 1.0;
    } else if psi > 190.0 && psi < 290.0 {
        w[2] = 1.0;
    } else {
        w[0] = 1.0;
    }
    w
}

/// One step's worth of diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct BankStep {
    pub input: ControlInput,
    pub weights: [f64; 3],
    /// 1-based index of the observer with the largest weight.
    pub dominant: usize,
}

pub struct YcooBank {
    filters: Vec<DiscreteFilter>,
    pub model: VehicleState,
    params: VehicleParams,
    dt: f64,
    data: &'static FrozenData,
}

impl YcooBank {
    /// Builds the bank at sample time `dt`, synthesizing and discretizing
    /// all three published observer designs.
    pub fn new(dt: f64, initial: VehicleState, params: VehicleParams) -> Result<Self, YcooError> {
        let data = frozen_data();
        let mut filters = Vec::with_capacity(3);
        for fd in &data.designs {
            let res = design(&fd.operating_point(), &fd.design_params(), &params)?;
            let ss = realize(&res.g_c)?;
            filters.push(DiscreteFilter::new(tustin(&ss, dt)?));
        }
        Ok(YcooBank {
            filters,
            model: initial,
            params,
            dt,
            data,
        })
    }

    pub fn sample_time(&self) -> f64 {
        self.dt
    }

    /// Current blending weights at the model heading.
    pub fn weights(&self) -> [f64; 3] {
        select_weights(self.model.psi.to_degrees(), self.data)
    }

    /// Advances the bank by one sample: all filters consume the innovation
    /// `(e_y, e_x)` (measured minus predicted output, lateral first), the
    /// blended control estimate drives the internal model.
    pub fn step(&mut self, e_y: f64, e_x: f64) -> BankStep {
        let weights = self.weights();
        let mut delta_f = 0.0;
        let mut a = 0.0;
        for (f, &w) in self.filters.iter_mut().zip(&weights) {
            let u = f.step(&[e_y, e_x]);
            delta_f += w * u[0];
            a += w * u[1];
        }
        let input = ControlInput::new(
            delta_f.clamp(-DELTA_F_LIMIT, DELTA_F_LIMIT),
            a.clamp(-ACCEL_LIMIT, ACCEL_LIMIT),
        );
        self.model = integrate_step(&self.model, &input, &self.params, self.dt);
        let dominant = weights
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .map(|(i, _)| i + 1)
            .unwrap();
        BankStep { input, weights, dominant }
    }
}
