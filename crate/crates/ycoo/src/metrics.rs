//! Evaluation battery: RMS errors, Welch p-values, mean error frequency,
//! tolerance verdicts, and comparison-report assembly.

use crate::error::YcooError;
use crate::sim::SimTrace;
use serde::Serialize;
use statrs::function::beta::beta_reg;

/// Root mean square of a residual sequence.
pub fn rms(residuals: &[f64]) -> f64 {
    assert!(!residuals.is_empty(), "rms of an empty sequence");
    (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
}

/// Heading residual in degrees, wrapped to (-180, 180] so physically
/// identical orientations (e.g. -90 degrees vs 270 degrees) compare as zero
/// error.
pub fn heading_residual_deg(psi_est: f64, psi_true: f64) -> f64 {
    let d = (psi_est - psi_true).to_degrees();
    let w = d - 360.0 * (d / 360.0).round();
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

/// Euclidean position error at sample `idx` of a trace.
pub fn trajectory_residual(trace: &SimTrace, idx: usize) -> f64 {
    let r = &trace.rows[idx];
    let dx = r.estimate.x - r.truth.x;
    let dy = r.estimate.y - r.truth.y;
    (dx * dx + dy * dy).sqrt()
}

/// Two-tailed Welch unequal-variance t-test on two samples.
///
/// Returns the p-value from the t statistic with Welch–Satterthwaite degrees
/// of freedom, evaluated through the regularized incomplete beta function.
/// Identical samples (zero combined variance, equal means) give 1; zero
/// combined variance with unequal means gives 0.
pub fn welch_p_value(sample_a: &[f64], sample_b: &[f64]) -> f64 {
    assert!(sample_a.len() >= 2 && sample_b.len() >= 2, "samples need n >= 2");
    let (na, nb) = (sample_a.len() as f64, sample_b.len() as f64);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64], m: f64| {
        s.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (s.len() as f64 - 1.0)
    };
    let (ma, mb) = (mean(sample_a), mean(sample_b));
    let (va, vb) = (var(sample_a, ma), var(sample_b, mb));
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        return if ma == mb { 1.0 } else { 0.0 };
    }
    let t = (ma - mb) / se2.sqrt();
    let nu = se2 * se2
        / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    // P(|T| > |t|) for T ~ t_nu, via I_x(nu/2, 1/2) with x = nu/(nu + t^2).
    let x = nu / (nu + t * t);
    beta_reg(nu / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Zero-crossing rate of the mean-removed residual:
/// (strict sign changes) / (2 · total duration).
pub fn mean_error_frequency(residuals: &[f64], t_s: f64) -> f64 {
    assert!(residuals.len() >= 2, "need at least two samples");
    assert!(t_s > 0.0, "sample period must be positive");
    let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
    let mut crossings = 0usize;
    let mut last_sign = 0i8;
    for r in residuals {
        let v = r - mean;
        let sign = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                crossings += 1;
            }
            last_sign = sign;
        }
    }
    let duration = (residuals.len() - 1) as f64 * t_s;
    crossings as f64 / (2.0 * duration)
}

/// RMS tolerances (the published half-precision thresholds).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ToleranceSet {
    pub trajectory_m: f64,
    pub psi_deg: f64,
    pub v_mps: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            trajectory_m: 0.05,
            psi_deg: 0.05,
            v_mps: 0.05,
        }
    }
}

pub const STATE_NAMES: [&str; 3] = ["trajectory_m", "psi_deg", "v_mps"];

/// Per-run metrics: RMS and mean error frequency for the trajectory
/// residual, the heading error (degrees), and the speed error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RunMetrics {
    pub rms: [f64; 3],
    pub error_frequency_hz: [f64; 3],
}

/// Computes [`RunMetrics`] from one trace.
pub fn run_metrics(trace: &SimTrace) -> RunMetrics {
    let n = trace.rows.len();
    let t_s = trace.sensor_period();
    let mut traj = Vec::with_capacity(n);
    let mut psi = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for (i, r) in trace.rows.iter().enumerate() {
        traj.push(trajectory_residual(trace, i));
        psi.push(heading_residual_deg(r.estimate.psi, r.truth.psi));
        v.push(r.estimate.v - r.truth.v);
    }
    RunMetrics {
        rms: [rms(&traj), rms(&psi), rms(&v)],
        error_frequency_hz: [
            mean_error_frequency(&traj, t_s),
            mean_error_frequency(&psi, t_s),
            mean_error_frequency(&v, t_s),
        ],
    }
}

/// Cross-run summary for one observer.
#[derive(Clone, Debug, Serialize)]
pub struct ObserverSummary {
    pub observer: String,
    pub runs: usize,
    /// Per-run RMS samples (the unit of the significance test).
    pub rms_per_run: Vec<[f64; 3]>,
    pub mean_rms: [f64; 3],
    /// Sample standard deviation of the per-run RMS; `None` for n = 1.
    pub std_rms: Option<[f64; 3]>,
    pub mean_error_frequency_hz: [f64; 3],
    /// `true` where mean RMS is below the tolerance.
    pub within_tolerance: [bool; 3],
}

/// Summarizes a set of runs of one observer.
pub fn summarize(observer: &str, traces: &[SimTrace], tol: &ToleranceSet) -> ObserverSummary {
    assert!(!traces.is_empty(), "no traces to summarize");
    let per_run: Vec<RunMetrics> = traces.iter().map(run_metrics).collect();
    let n = per_run.len();
    let mut mean_rms = [0.0; 3];
    let mut mean_freq = [0.0; 3];
    for m in &per_run {
        for k in 0..3 {
            mean_rms[k] += m.rms[k] / n as f64;
            mean_freq[k] += m.error_frequency_hz[k] / n as f64;
        }
    }
    let std_rms = if n >= 2 {
        let mut s = [0.0; 3];
        for m in &per_run {
            for k in 0..3 {
                s[k] += (m.rms[k] - mean_rms[k]).powi(2);
            }
        }
        Some([
            (s[0] / (n as f64 - 1.0)).sqrt(),
            (s[1] / (n as f64 - 1.0)).sqrt(),
            (s[2] / (n as f64 - 1.0)).sqrt(),
        ])
    } else {
        None
    };
    let tols = [tol.trajectory_m, tol.psi_deg, tol.v_mps];
    ObserverSummary {
        observer: observer.to_string(),
        runs: n,
        rms_per_run: per_run.iter().map(|m| m.rms).collect(),
        mean_rms,
        std_rms,
        mean_error_frequency_hz: mean_freq,
        within_tolerance: [
            mean_rms[0] < tols[0],
            mean_rms[1] < tols[1],
            mean_rms[2] < tols[2],
        ],
    }
}

/// Two-observer comparison over matched run sets.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub tolerances: ToleranceSet,
    pub ycoo: ObserverSummary,
    pub baseline: ObserverSummary,
    /// Welch p-values on per-run RMS, per state; `None` when n = 1.
    pub p_values: [Option<f64>; 3],
}

/// Assembles the comparison report for matched YCOO/baseline run sets.
pub fn build_report(
    traces_ycoo: &[SimTrace],
    traces_nl: &[SimTrace],
    tolerances: &ToleranceSet,
) -> Result<MetricsReport, YcooError> {
    if traces_ycoo.is_empty() || traces_nl.is_empty() {
        return Err(YcooError::InvalidConfig {
            detail: "empty trace set".into(),
        });
    }
    if traces_ycoo.len() != traces_nl.len() {
        return Err(YcooError::InvalidConfig {
            detail: format!(
                "run counts differ: {} vs {}",
                traces_ycoo.len(),
                traces_nl.len()
            ),
        });
    }
    if traces_ycoo[0].scenario != traces_nl[0].scenario {
        return Err(YcooError::InvalidConfig {
            detail: "trace sets are from different scenarios".into(),
        });
    }
    let ycoo = summarize("ycoo", traces_ycoo, tolerances);
    let baseline = summarize("luenberger", traces_nl, tolerances);
    let n = ycoo.runs;
    let mut p_values = [None; 3];
    if n >= 2 {
        for k in 0..3 {
            let a: Vec<f64> = ycoo.rms_per_run.iter().map(|r| r[k]).collect();
            let b: Vec<f64> = baseline.rms_per_run.iter().map(|r| r[k]).collect();
            p_values[k] = Some(welch_p_value(&a, &b));
        }
    }
    Ok(MetricsReport {
        scenario: traces_ycoo[0].scenario.name().to_string(),
        tolerances: *tolerances,
        ycoo,
        baseline,
        p_values,
    })
}

fn render_summary_rows(out: &mut String, s: &ObserverSummary) {
    for k in 0..3 {
        let std = match &s.std_rms {
            Some(v) => format!("{:>12.6}", v[k]),
            None => format!("{:>12}", "n/a"),
        };
        let flag = if s.within_tolerance[k] { "  " } else { " !" };
        out.push_str(&format!(
            "{:<12} {:<13} {:>12.6} {} {:>12.3}{}\n",
            s.observer, STATE_NAMES[k], s.mean_rms[k], std, s.mean_error_frequency_hz[k], flag
        ));
    }
}

/// Aligned-text rendering of a single-observer summary.
pub fn render_summary_text(scenario: &str, s: &ObserverSummary) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {scenario}  (runs: {})\n", s.runs));
    out.push_str(&format!(
        "{:<12} {:<13} {:>12} {:>12} {:>12}\n",
        "observer", "state", "mean RMS", "STD", "err freq Hz"
    ));
    render_summary_rows(&mut out, s);
    out.push_str("rows marked '!' exceed the 0.05 tolerance\n");
    out
}

/// Aligned-text rendering of the comparison report.
pub fn render_report_text(r: &MetricsReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}  (runs: {})\n", r.scenario, r.ycoo.runs));
    out.push_str(&format!(
        "{:<12} {:<13} {:>12} {:>12} {:>12}\n",
        "observer", "state", "mean RMS", "STD", "err freq Hz"
    ));
    render_summary_rows(&mut out, &r.ycoo);
    render_summary_rows(&mut out, &r.baseline);
    out.push_str("p-values (Welch, per-run RMS):");
    for k in 0..3 {
        match r.p_values[k] {
            Some(p) => out.push_str(&format!("  {} = {:.4}", STATE_NAMES[k], p)),
            None => out.push_str(&format!("  {} = n/a", STATE_NAMES[k])),
        }
    }
    out.push('\n');
    out.push_str("rows marked '!' exceed the 0.05 tolerance\n");
    out
}
