//! Scenario generation, sensor simulation, the closed-loop truth/observer
//! co-simulation, the Monte-Carlo driver, and the wheelbase-mismatch
//! robustness sweep.

use crate::error::YcooError;
use crate::observers::{LuenbergerObserver, YcooBank};
use crate::vehicle::{integrate_step_with, measure, ControlInput, VehicleParams, VehicleState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Integration step for truth and observers (s).
pub const SIM_DT: f64 = 1e-4;

/// Default sensor period (s): 1 kHz position updates.
pub const SENSOR_PERIOD: f64 = 1e-3;

/// Default per-sample measurement variance (m^2).
pub const NOISE_VARIANCE: f64 = 0.01;

/// Number of sensor samples in the initialization window (0.1 s at 1 kHz).
///
/// The observer's initial position, heading, and speed are taken from a
/// constant-velocity least-squares fit over this window. A two-sample
/// bearing/finite-difference over one sensor period is hopeless at the
/// published noise level (0.1 m noise against 0.01 m of true motion per
/// sample), whereas the 0.1 s fit brings the initial heading error down to
/// a few degrees and the speed error below 1 m/s.
pub const INIT_WINDOW_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Straight,
    LaneChange,
    DoubleLaneChange,
    CrossTraffic,
    LeftTurn,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Straight,
        ScenarioKind::LaneChange,
        ScenarioKind::DoubleLaneChange,
        ScenarioKind::CrossTraffic,
        ScenarioKind::LeftTurn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Straight => "straight",
            ScenarioKind::LaneChange => "lane_change",
            ScenarioKind::DoubleLaneChange => "double_lane_change",
            ScenarioKind::CrossTraffic => "cross_traffic",
            ScenarioKind::LeftTurn => "left_turn",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, YcooError> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| YcooError::UnknownScenario { name: name.to_string() })
    }
}

/// How the configured noise power is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Power is the per-sample variance at the sensor (default).
    PerSample,
    /// Power is a PSD height; per-sample variance = power / sensor period.
    Psd,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum ObserverKind {
    Ycoo,
    Luenberger,
}

impl ObserverKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObserverKind::Ycoo => "ycoo",
            ObserverKind::Luenberger => "luenberger",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub duration: f64,
    pub initial: VehicleState,
    pub sensor_period: f64,
    /// Per-sample measurement variance (m^2), after noise-mode resolution.
    pub noise_variance: f64,
    pub seed: u64,
    /// Parameters of the real vehicle (scaled in robustness sweeps).
    pub truth_params: VehicleParams,
    /// Parameters the observers assume (always nominal).
    pub observer_params: VehicleParams,
    /// Initialize the observer at the exact truth state instead of deriving
    /// position/heading/speed from the first two measurements.
    pub exact_init: bool,
}

impl ScenarioSpec {
    /// True control input at time `t`.
    pub fn input(&self, t: f64) -> ControlInput {
        let deg = |d: f64| (d as f64).to_radians();
        match self.kind {
            ScenarioKind::Straight | ScenarioKind::CrossTraffic => {
                let a = if t < 5.0 { 0.7 } else { 0.0 };
                ControlInput::new(0.0, a)
            }
            ScenarioKind::LaneChange => {
                let d = if (3.0..7.0).contains(&t) {
                    deg(2.0) * (2.0 * std::f64::consts::PI * (t - 3.0) / 4.0).sin()
                } else {
                    0.0
                };
                ControlInput::new(d, 0.0)
            }
            ScenarioKind::DoubleLaneChange => {
                let d = if (2.0..6.0).contains(&t) {
                    deg(2.0) * (2.0 * std::f64::consts::PI * (t - 2.0) / 4.0).sin()
                } else if (6.0..10.0).contains(&t) {
                    -deg(2.0) * (2.0 * std::f64::consts::PI * (t - 6.0) / 4.0).sin()
                } else {
                    0.0
                };
                ControlInput::new(d, 0.0)
            }
            ScenarioKind::LeftTurn => {
                let d = if (4.0..16.0).contains(&t) { deg(4.0) } else { 0.0 };
                ControlInput::new(d, 0.0)
            }
        }
    }
}

/// Deterministic default scenario (seed 0, nominal parameters, measurement
/// noise at the published power, measurement-based initialization).
pub fn build_scenario(kind: ScenarioKind) -> ScenarioSpec {
    let (duration, initial) = match kind {
        ScenarioKind::Straight => (10.0, VehicleState::new(0.0, 0.0, 8.0, 0.0)),
        ScenarioKind::LaneChange => (10.0, VehicleState::new(0.0, 0.0, 10.0, 0.0)),
        ScenarioKind::DoubleLaneChange => (10.0, VehicleState::new(0.0, 0.0, 10.0, 0.0)),
        ScenarioKind::CrossTraffic => {
            (10.0, VehicleState::new(0.0, 0.0, 8.0, 270f64.to_radians()))
        }
        ScenarioKind::LeftTurn => (20.0, VehicleState::new(0.0, 0.0, 8.0, 100f64.to_radians())),
    };
    ScenarioSpec {
        kind,
        duration,
        initial,
        sensor_period: SENSOR_PERIOD,
        noise_variance: NOISE_VARIANCE,
        seed: 0,
        truth_params: VehicleParams::default(),
        observer_params: VehicleParams::default(),
        exact_init: false,
    }
}

/// One noisy position sample: `(Y, X)` plus independent zero-mean Gaussian
/// noise on each component.
pub fn sensor_sample(
    truth: &VehicleState,
    noise_variance: f64,
    rng: &mut impl rand::Rng,
) -> crate::vehicle::Measurement {
    assert!(noise_variance >= 0.0, "variance must be nonnegative");
    let mut m = measure(truth);
    if noise_variance > 0.0 {
        let n = Normal::new(0.0, noise_variance.sqrt()).unwrap();
        m.y += n.sample(rng);
        m.x += n.sample(rng);
    }
    m
}

/// One logged sample (at sensor rate).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub truth: VehicleState,
    pub estimate: VehicleState,
    pub meas_y: f64,
    pub meas_x: f64,
    pub input_true: ControlInput,
    pub input_est: ControlInput,
    pub weights: [f64; 3],
    /// Dominant observer (1..=3) for the bank, active gain id for the
    /// baseline.
    pub region: u32,
}

#[derive(Clone, Debug)]
pub struct SimTrace {
    pub scenario: ScenarioKind,
    pub observer: ObserverKind,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
}

impl SimTrace {
    pub fn sensor_period(&self) -> f64 {
        self.rows[1].t - self.rows[0].t
    }
}

/// Constant-velocity least-squares fit over the initialization window:
/// position from the fitted line evaluated at `t_eval`, heading from the
/// bearing of the velocity estimate, speed from its magnitude.
fn fit_initial_state(
    samples: &[(f64, crate::vehicle::Measurement)],
    t_eval: f64,
) -> VehicleState {
    let n = samples.len() as f64;
    let t_mean = samples.iter().map(|(t, _)| t).sum::<f64>() / n;
    let x_mean = samples.iter().map(|(_, m)| m.x).sum::<f64>() / n;
    let y_mean = samples.iter().map(|(_, m)| m.y).sum::<f64>() / n;
    let denom: f64 = samples.iter().map(|(t, _)| (t - t_mean).powi(2)).sum();
    let vx: f64 = samples
        .iter()
        .map(|(t, m)| (t - t_mean) * (m.x - x_mean))
        .sum::<f64>()
        / denom;
    let vy: f64 = samples
        .iter()
        .map(|(t, m)| (t - t_mean) * (m.y - y_mean))
        .sum::<f64>()
        / denom;
    VehicleState::new(
        x_mean + vx * (t_eval - t_mean),
        y_mean + vy * (t_eval - t_mean),
        vx.hypot(vy),
        vy.atan2(vx),
    )
}

enum ObserverState {
    Ycoo(Box<YcooBank>),
    Luenberger(LuenbergerObserver),
}

fn check_finite(s: &VehicleState, t: f64) -> Result<(), YcooError> {
    let a = s.as_array();
    if a.iter().any(|v| !v.is_finite() || v.abs() > 1e6) {
        return Err(YcooError::Divergence { t });
    }
    Ok(())
}

/// Runs one truth/observer co-simulation.
///
/// Truth integrates at [`SIM_DT`] with the scenario's input profile; the
/// sensor fires every `spec.sensor_period` and its sample is held between
/// ticks; the observer steps at [`SIM_DT`]; the trace is logged at sensor
/// rate (the first row is at t = 0).
pub fn run_closed_loop(spec: &ScenarioSpec, observer: ObserverKind) -> Result<SimTrace, YcooError> {
    let dt = SIM_DT;
    let sensor_every = (spec.sensor_period / dt).round() as usize;
    let n_steps = (spec.duration / dt).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let make_observer = |init: VehicleState| -> Result<ObserverState, YcooError> {
        Ok(match observer {
            ObserverKind::Ycoo => {
                ObserverState::Ycoo(Box::new(YcooBank::new(dt, init, spec.observer_params)?))
            }
            ObserverKind::Luenberger => {
                ObserverState::Luenberger(LuenbergerObserver::new(init, spec.observer_params))
            }
        })
    };
    let log_state = |obs: &Option<ObserverState>, fallback: VehicleState| match obs {
        Some(ObserverState::Ycoo(b)) => b.model,
        Some(ObserverState::Luenberger(l)) => l.state,
        None => fallback,
    };

    let mut truth = spec.initial;
    let mut held = sensor_sample(&truth, spec.noise_variance, &mut rng);
    let mut obs: Option<ObserverState> = if spec.exact_init {
        Some(make_observer(truth)?)
    } else {
        None
    };
    // (t, measurement) pairs accumulated for the initialization fit.
    let mut init_buf: Vec<(f64, crate::vehicle::Measurement)> = vec![(0.0, held)];

    let mut rows: Vec<TraceRow> = Vec::with_capacity(n_steps / sensor_every + 2);
    let mut last_input_est = ControlInput::new(0.0, 0.0);
    let mut last_weights = [0.0; 3];
    let mut last_region = 0u32;

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        if k > 0 && (k % sensor_every) == 0 {
            held = sensor_sample(&truth, spec.noise_variance, &mut rng);
            if obs.is_none() {
                init_buf.push((t, held));
                if init_buf.len() > INIT_WINDOW_SAMPLES {
                    let init = fit_initial_state(&init_buf, t);
                    obs = Some(make_observer(init)?);
                    // Backfill the pre-initialization rows with the fitted
                    // line evaluated at each row's own time so the logged
                    // estimate column is well defined throughout.
                    for r in &mut rows {
                        r.estimate = fit_initial_state(&init_buf, r.t);
                    }
                }
            }
        }
        if (k % sensor_every) == 0 {
            // Log before stepping so the row at time t reflects states at t.
            let (weights, region) = match &obs {
                Some(ObserverState::Luenberger(l)) => ([0.0; 3], l.active_gain()),
                _ => (last_weights, last_region),
            };
            rows.push(TraceRow {
                t,
                truth,
                estimate: log_state(&obs, spec.initial),
                meas_y: held.y,
                meas_x: held.x,
                input_true: spec.input(t),
                input_est: last_input_est,
                weights,
                region,
            });
        }
        if k == n_steps {
            break;
        }
        match &mut obs {
            Some(ObserverState::Ycoo(bank)) => {
                let p = measure(&bank.model);
                let step = bank.step(held.y - p.y, held.x - p.x);
                last_input_est = step.input;
                last_weights = step.weights;
                last_region = step.dominant as u32;
            }
            Some(ObserverState::Luenberger(l)) => {
                let p = measure(&l.state);
                l.step(held.x - p.x, held.y - p.y, dt);
            }
            None => {}
        }
        truth = integrate_step_with(&truth, |tau| spec.input(tau), &spec.truth_params, t, dt);
        check_finite(&truth, t)?;
        check_finite(&log_state(&obs, spec.initial), t)?;
    }

    Ok(SimTrace {
        scenario: spec.kind,
        observer,
        seed: spec.seed,
        rows,
    })
}

/// `n_runs` independent runs with seeds `base_seed + k`, executed in
/// parallel, returned in seed order.
pub fn monte_carlo(
    spec: &ScenarioSpec,
    observer: ObserverKind,
    n_runs: usize,
    base_seed: u64,
) -> Result<Vec<SimTrace>, YcooError> {
    assert!(n_runs >= 1, "need at least one run");
    (0..n_runs)
        .into_par_iter()
        .map(|k| {
            let mut s = spec.clone();
            s.seed = base_seed + k as u64;
            run_closed_loop(&s, observer)
        })
        .collect()
}

/// Noise-free runs with the truth wheelbase `l_t` scaled by each factor
/// (`l_r` kept fixed); the observer keeps nominal parameters.
pub fn robustness_sweep(
    base: &ScenarioSpec,
    factors: &[f64],
    observer: ObserverKind,
) -> Result<Vec<(f64, SimTrace)>, YcooError> {
    assert!(!factors.is_empty(), "factor list must be nonempty");
    assert!(factors.iter().all(|&f| f > 0.0), "factors must be positive");
    factors
        .par_iter()
        .map(|&f| {
            let mut s = base.clone();
            s.noise_variance = 0.0;
            s.truth_params = base.truth_params.scaled_wheelbase(f);
            run_closed_loop(&s, observer).map(|tr| (f, tr))
        })
        .collect()
}
