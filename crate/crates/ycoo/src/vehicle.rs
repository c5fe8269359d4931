//! Nonlinear kinematic bicycle model: dynamics, measurement, slip angle,
//! Jacobians, and a fixed-step Runge-Kutta integrator.
//!
//! State `s = [X, Y, V, psi]` (positions in m, speed in m/s, orientation in
//! rad), input `u = [delta_f, a]` (front steering angle in rad, longitudinal
//! acceleration in m/s^2). `psi` is kept unwrapped; wrapping to [0°, 360°)
//! happens only at the observer-selection boundary.

use nalgebra::{Matrix4, Matrix4x2};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub psi: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, v: f64, psi: f64) -> Self {
        VehicleState { x, y, v, psi }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.v, self.psi]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        VehicleState {
            x: a[0],
            y: a[1],
            v: a[2],
            psi: a[3],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    pub delta_f: f64,
    pub a: f64,
}

impl ControlInput {
    pub fn new(delta_f: f64, a: f64) -> Self {
        ControlInput { delta_f, a }
    }

    pub fn zero() -> Self {
        ControlInput {
            delta_f: 0.0,
            a: 0.0,
        }
    }
}

/// Geometry: distances from the center of mass to the front and rear axles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub l_f: f64,
    pub l_r: f64,
}

impl VehicleParams {
    pub fn new(l_f: f64, l_r: f64) -> Self {
        assert!(l_f > 0.0 && l_r > 0.0, "axle distances must be positive");
        VehicleParams { l_f, l_r }
    }

    /// Wheelbase `l_t = l_f + l_r`.
    pub fn wheelbase(&self) -> f64 {
        self.l_f + self.l_r
    }

    /// Scales the wheelbase by `factor`, keeping the front/rear split.
    pub fn scaled(&self, factor: f64) -> Self {
        VehicleParams {
            l_f: self.l_f * factor,
            l_r: self.l_r * factor,
        }
    }

    /// Scales the wheelbase `l_t` by `factor` while keeping `l_r` fixed
    /// (the extra length goes to `l_f`). This is the perturbation the
    /// robustness sweep uses: it varies the parameter `l_t` exactly where
    /// it appears in the dynamics while leaving `l_r` alone.
    pub fn scaled_wheelbase(&self, factor: f64) -> Self {
        let l_t = self.wheelbase() * factor;
        assert!(
            l_t > self.l_r,
            "wheelbase factor {factor} would make l_f nonpositive"
        );
        VehicleParams {
            l_f: l_t - self.l_r,
            l_r: self.l_r,
        }
    }
}

impl Default for VehicleParams {
    /// Nominal geometry: 2.8 m wheelbase with l_r/(l_f+l_r) = 0.51786,
    /// the split the published linearization matrices are built from.
    fn default() -> Self {
        VehicleParams {
            l_f: 1.35,
            l_r: 1.45,
        }
    }
}

/// Radar measurement `(Y, X)` — lateral first, then longitudinal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub y: f64,
    pub x: f64,
}

/// Slip angle `beta = atan(l_r tan(delta_f) / (l_f + l_r))`, evaluated
/// exactly (no small-angle approximation in the truth model).
pub fn slip_angle(delta_f: f64, params: &VehicleParams) -> f64 {
    (params.l_r * delta_f.tan() / params.wheelbase()).atan()
}

/// State derivative of the kinematic bicycle model:
/// `[V cos(psi+beta), V sin(psi+beta), a, V cos(beta) tan(delta_f) / l_t]`.
pub fn dynamics(s: &VehicleState, u: &ControlInput, params: &VehicleParams) -> [f64; 4] {
    let beta = slip_angle(u.delta_f, params);
    [
        s.v * (s.psi + beta).cos(),
        s.v * (s.psi + beta).sin(),
        u.a,
        s.v * beta.cos() * u.delta_f.tan() / params.wheelbase(),
    ]
}

/// `y = C s` with `C = [[0,1,0,0],[1,0,0,0]]`: the radar reports `(Y, X)`.
pub fn measure(s: &VehicleState) -> Measurement {
    Measurement { y: s.y, x: s.x }
}

/// Jacobian of `dynamics` with respect to the state.
pub fn jacobian_a(s: &VehicleState, u: &ControlInput, params: &VehicleParams) -> Matrix4<f64> {
    let beta = slip_angle(u.delta_f, params);
    let c = (s.psi + beta).cos();
    let sn = (s.psi + beta).sin();
    let mut a = Matrix4::zeros();
    a[(0, 2)] = c;
    a[(0, 3)] = -s.v * sn;
    a[(1, 2)] = sn;
    a[(1, 3)] = s.v * c;
    a[(3, 2)] = beta.cos() * u.delta_f.tan() / params.wheelbase();
    a
}

/// Jacobian of `dynamics` with respect to the input.
pub fn jacobian_b(s: &VehicleState, u: &ControlInput, params: &VehicleParams) -> Matrix4x2<f64> {
    let lt = params.wheelbase();
    let t = u.delta_f.tan();
    let sec2 = 1.0 + t * t;
    // d beta / d delta_f at the evaluation point.
    let k = params.l_r / lt;
    let dbeta = k * sec2 / (1.0 + (k * t) * (k * t));
    let beta = slip_angle(u.delta_f, params);
    let mut b = Matrix4x2::zeros();
    b[(0, 0)] = -s.v * (s.psi + beta).sin() * dbeta;
    b[(1, 0)] = s.v * (s.psi + beta).cos() * dbeta;
    b[(2, 1)] = 1.0;
    b[(3, 0)] = s.v * (beta.cos() * sec2 - beta.sin() * t * dbeta) / lt;
    b
}

/// One classical 4th-order Runge-Kutta step with the input sampled at the
/// substep times from `u_of_t` (so time-varying profiles integrate at full
/// RK4 order).
pub fn integrate_step_with<F>(
    s: &VehicleState,
    u_of_t: F,
    params: &VehicleParams,
    t: f64,
    dt: f64,
) -> VehicleState
where
    F: Fn(f64) -> ControlInput,
{
    assert!(dt > 0.0, "step size must be positive");
    let u0 = u_of_t(t);
    let um = u_of_t(t + 0.5 * dt);
    let u1 = u_of_t(t + dt);
    let y0 = s.as_array();
    let k1 = dynamics(s, &u0, params);
    let k2 = dynamics(&advance(&y0, &k1, 0.5 * dt), &um, params);
    let k3 = dynamics(&advance(&y0, &k2, 0.5 * dt), &um, params);
    let k4 = dynamics(&advance(&y0, &k3, dt), &u1, params);
    let mut out = y0;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    VehicleState::from_array(out)
}

/// One RK4 step with the input held constant over the step.
pub fn integrate_step(
    s: &VehicleState,
    u: &ControlInput,
    params: &VehicleParams,
    dt: f64,
) -> VehicleState {
    integrate_step_with(s, |_| *u, params, 0.0, dt)
}

fn advance(y: &[f64; 4], k: &[f64; 4], h: f64) -> VehicleState {
    VehicleState::from_array([
        y[0] + h * k[0],
        y[1] + h * k[1],
        y[2] + h * k[2],
        y[3] + h * k[3],
    ])
}
