//! Baseline extended Luenberger observer with four published heading-gated
//! gain sets.
//!
//! The observer integrates the nonlinear vehicle model with zero assumed
//! input plus a constant output-injection correction `L (y_meas - y_est)`,
//! where the innovation is ordered (X error, Y error) to match the gain
//! columns. Gain selection is hysteretic: the active gain is kept while the
//! heading estimate stays inside its (overlapping) region.

use crate::frozen::{frozen_data, FrozenData, LuenbergerGainSet};
use crate::vehicle::{dynamics, jacobian_a, ControlInput, VehicleParams, VehicleState};
use nalgebra::{Matrix4, Matrix4x2, Vector2, Vector4};

use super::bank::wrap_deg;

/// True if `psi_deg` (any range) lies inside the region, which may wrap
/// through 0/360 when its lower bound is negative.
pub fn in_region(psi_deg: f64, region: [f64; 2]) -> bool {
    let psi = wrap_deg(psi_deg);
    let [lo, hi] = region;
    if lo < 0.0 {
        psi >= lo + 360.0 || psi <= hi
    } else {
        psi >= lo && psi <= hi
    }
}

/// Index (0-based) of the gain set to use at `psi_deg`, keeping `current`
/// while its region still contains the heading.
pub fn select_gain(psi_deg: f64, current: usize, gains: &[LuenbergerGainSet]) -> usize {
    if in_region(psi_deg, gains[current].region_deg) {
        return current;
    }
    let psi = wrap_deg(psi_deg);
    let mut best = current;
    let mut best_dist = f64::INFINITY;
    for (i, g) in gains.iter().enumerate() {
        if !in_region(psi, g.region_deg) {
            continue;
        }
        let center = wrap_deg((g.region_deg[0] + g.region_deg[1]) / 2.0);
        let mut d = (psi - center).abs();
        if d > 180.0 {
            d = 360.0 - d;
        }
        if d < best_dist {
            best_dist = d;
            best = i;
        }
    }
    best
}

pub struct LuenbergerObserver {
    pub state: VehicleState,
    params: VehicleParams,
    active: usize,
    data: &'static FrozenData,
}

impl LuenbergerObserver {
    pub fn new(initial: VehicleState, params: VehicleParams) -> Self {
        let data = frozen_data();
        let active = select_gain(initial.psi.to_degrees(), 0, &data.luenberger_gains);
        LuenbergerObserver {
            state: initial,
            params,
            active,
            data,
        }
    }

    /// 1-based id of the active gain set.
    pub fn active_gain(&self) -> u32 {
        self.data.luenberger_gains[self.active].id
    }

    fn l_matrix(&self) -> Matrix4x2<f64> {
        let l = &self.data.luenberger_gains[self.active].l;
        Matrix4x2::from_fn(|r, c| l[r][c])
    }

    /// Advances the observer one step of `dt` with the innovation
    /// `(e_x, e_y)` held constant over the step (RK4 on the corrected
    /// dynamics, assumed input zero).
    pub fn step(&mut self, e_x: f64, e_y: f64, dt: f64) {
        self.active = select_gain(
            self.state.psi.to_degrees(),
            self.active,
            &self.data.luenberger_gains,
        );
        let l = self.l_matrix();
        let corr = l * Vector2::new(e_x, e_y);
        let u = ControlInput::new(0.0, 0.0);
        let f = |s: &VehicleState| -> Vector4<f64> {
            let d = dynamics(s, &u, &self.params);
            Vector4::new(d[0] + corr[0], d[1] + corr[1], d[2] + corr[2], d[3] + corr[3])
        };
        let advance = |s: &VehicleState, k: &Vector4<f64>, h: f64| {
            VehicleState::new(s.x + h * k[0], s.y + h * k[1], s.v + h * k[2], s.psi + h * k[3])
        };
        let s = self.state;
        let k1 = f(&s);
        let k2 = f(&advance(&s, &k1, dt / 2.0));
        let k3 = f(&advance(&s, &k2, dt / 2.0));
        let k4 = f(&advance(&s, &k3, dt));
        let k = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        self.state = advance(&s, &k, dt);
    }
}

/// Stability report for one gain set over the verification grid.
#[derive(Clone, Debug)]
pub struct GainStabilityReport {
    pub gain_id: u32,
    pub cases: usize,
    pub max_real_part: f64,
    pub stable: bool,
}

/// Checks every published gain set for local error-dynamics stability
/// (`Re lambda < 0` for `A - L C`) over a grid of speeds, steering angles,
/// and headings spanning its region.
pub fn verify_gain_stability(params: &VehicleParams) -> Vec<GainStabilityReport> {
    let data = frozen_data();
    let speeds: Vec<f64> = std::iter::once(0.5)
        .chain((1..=10).map(|k| 2.0 * k as f64))
        .collect();
    let steers: Vec<f64> = (-4..=4).map(|k| (5.0 * k as f64).to_radians()).collect();
    let mut reports = Vec::new();
    for g in &data.luenberger_gains {
        let l = Matrix4x2::from_fn(|r, c| g.l[r][c]);
        // Output matrix: the measured states are X and Y.
        let mut c = nalgebra::Matrix2x4::<f64>::zeros();
        c[(0, 0)] = 1.0;
        c[(1, 1)] = 1.0;
        let lc: Matrix4<f64> = l * c;
        let mut cases = 0usize;
        let mut max_re = f64::NEG_INFINITY;
        let [lo, hi] = g.region_deg;
        let mut psi_deg = lo;
        while psi_deg <= hi + 1e-9 {
            for &v in &speeds {
                for &df in &steers {
                    let s = VehicleState::new(0.0, 0.0, v, psi_deg.to_radians());
                    let u = ControlInput::new(df, 0.0);
                    let a = jacobian_a(&s, &u, params);
                    let err = a - lc;
                    for ev in err.complex_eigenvalues().iter() {
                        max_re = max_re.max(ev.re);
                    }
                    cases += 1;
                }
            }
            psi_deg += 10.0;
        }
        reports.push(GainStabilityReport {
            gain_id: g.id,
            cases,
            max_real_part: max_re,
            stable: max_re < 0.0,
        });
    }
    reports
}
