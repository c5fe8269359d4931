//! Command-line plumbing: configuration resolution, subcommand
//! implementations, and file emission (CSV traces, JSON/text reports, SVG
//! plots).

use crate::design::{bandwidth_report, design, published_design_suite};
use crate::error::YcooError;
use crate::frozen::{frozen_data, self_check};
use crate::metrics::{
    build_report, render_report_text, render_summary_text, run_metrics, summarize, ToleranceSet,
};
use crate::plot::{line_plot, Series};
use crate::ratfun::matrix::TransferMatrix;
use crate::sim::{
    build_scenario, monte_carlo, robustness_sweep, NoiseMode, ObserverKind, ScenarioKind,
    ScenarioSpec, SimTrace, NOISE_VARIANCE, SENSOR_PERIOD,
};
use crate::vehicle::VehicleParams;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Resolved run configuration: file values overlaid with CLI flags,
/// everything defaulted so an empty config reproduces the published
/// five-scenario comparison.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Scenario name; `None` means all five (compare) or `straight`
    /// (simulate).
    pub scenario: Option<String>,
    /// `ycoo`, `luenberger`, or `both`.
    pub observer: String,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub noise_mode: NoiseMode,
    /// Noise power (m^2); meaning depends on `noise_mode`.
    pub noise_power: f64,
    pub l_t_factors: Vec<f64>,
    pub plots: bool,
    pub exact_init: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: None,
            observer: "both".into(),
            runs: 30,
            seed: 0,
            out: PathBuf::from("out"),
            noise_mode: NoiseMode::PerSample,
            noise_power: NOISE_VARIANCE,
            l_t_factors: vec![0.8, 1.0, 1.2],
            plots: false,
            exact_init: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, YcooError> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                toml::from_str(&text).map_err(|e| YcooError::InvalidConfig {
                    detail: format!("{}: {e}", p.display()),
                })
            }
        }
    }

    /// Per-sample measurement variance after noise-mode resolution.
    pub fn noise_variance(&self) -> f64 {
        match self.noise_mode {
            NoiseMode::PerSample => self.noise_power,
            NoiseMode::Psd => self.noise_power / SENSOR_PERIOD,
        }
    }

    pub fn observers(&self) -> Result<Vec<ObserverKind>, YcooError> {
        match self.observer.as_str() {
            "ycoo" => Ok(vec![ObserverKind::Ycoo]),
            "luenberger" => Ok(vec![ObserverKind::Luenberger]),
            "both" => Ok(vec![ObserverKind::Ycoo, ObserverKind::Luenberger]),
            other => Err(YcooError::InvalidConfig {
                detail: format!("unknown observer '{other}' (ycoo|luenberger|both)"),
            }),
        }
    }

    pub fn scenarios(&self, default_all: bool) -> Result<Vec<ScenarioKind>, YcooError> {
        match &self.scenario {
            Some(name) => Ok(vec![ScenarioKind::from_name(name)?]),
            None if default_all => Ok(ScenarioKind::ALL.to_vec()),
            None => Ok(vec![ScenarioKind::Straight]),
        }
    }

    pub fn spec(&self, kind: ScenarioKind) -> ScenarioSpec {
        let mut spec = build_scenario(kind);
        spec.seed = self.seed;
        spec.noise_variance = self.noise_variance();
        spec.exact_init = self.exact_init;
        spec
    }

    fn ensure_out(&self) -> Result<(), YcooError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(())
    }
}

/// CSV schema shared by all emitted traces.
pub const CSV_HEADER: &str = "t,X_true,Y_true,V_true,psi_true,X_est,Y_est,V_est,psi_est,\
Y_meas,X_meas,delta_true,a_true,delta_est,a_est,w1,w2,w3,region";

/// Renders a trace as CSV (angles in radians, SI units throughout).
pub fn trace_to_csv(trace: &SimTrace) -> String {
    let mut out = String::with_capacity(trace.rows.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &trace.rows {
        let _ = writeln!(
            out,
            "{:.4},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.6},{:.6},{:.6},{}",
            r.t,
            r.truth.x,
            r.truth.y,
            r.truth.v,
            r.truth.psi,
            r.estimate.x,
            r.estimate.y,
            r.estimate.v,
            r.estimate.psi,
            r.meas_y,
            r.meas_x,
            r.input_true.delta_f,
            r.input_true.a,
            r.input_est.delta_f,
            r.input_est.a,
            r.weights[0],
            r.weights[1],
            r.weights[2],
            r.region
        );
    }
    out
}

fn write_trace_plots(dir: &Path, stem: &str, trace: &SimTrace) -> Result<(), YcooError> {
    let take = |f: &dyn Fn(&crate::sim::TraceRow) -> f64| -> Vec<(f64, f64)> {
        trace.rows.iter().map(|r| (r.t, f(r))).collect()
    };
    line_plot(
        &dir.join(format!("{stem}_path.svg")),
        &format!("{stem}: trajectory"),
        "X (m)",
        &[
            Series {
                label: "truth".into(),
                points: trace.rows.iter().map(|r| (r.truth.x, r.truth.y)).collect(),
            },
            Series {
                label: "estimate".into(),
                points: trace
                    .rows
                    .iter()
                    .map(|r| (r.estimate.x, r.estimate.y))
                    .collect(),
            },
        ],
    )?;
    line_plot(
        &dir.join(format!("{stem}_errors.svg")),
        &format!("{stem}: estimation errors"),
        "t (s)",
        &[
            Series {
                label: "dX (m)".into(),
                points: take(&|r| r.estimate.x - r.truth.x),
            },
            Series {
                label: "dY (m)".into(),
                points: take(&|r| r.estimate.y - r.truth.y),
            },
            Series {
                label: "dV (m/s)".into(),
                points: take(&|r| r.estimate.v - r.truth.v),
            },
            Series {
                label: "dpsi (deg)".into(),
                points: take(&|r| {
                    crate::metrics::heading_residual_deg(r.estimate.psi, r.truth.psi)
                }),
            },
        ],
    )?;
    Ok(())
}

fn format_matrix(out: &mut String, name: &str, m: &TransferMatrix) {
    let _ = writeln!(out, "{name} ({}x{}):", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = m.entry(i, j);
            if e.is_zero() {
                let _ = writeln!(out, "  ({i},{j}): 0");
                continue;
            }
            let _ = writeln!(
                out,
                "  ({i},{j}): num {:?} / den {:?}",
                e.num().coeffs(),
                e.den().coeffs()
            );
            let zeros: Vec<String> = e.zeros().iter().map(|z| format!("{z:.4}")).collect();
            let poles: Vec<String> = e.poles().iter().map(|p| format!("{p:.4}")).collect();
            let _ = writeln!(
                out,
                "         gain {:.6e}, zeros [{}], poles [{}]",
                e.factored_gain(),
                zeros.join(", "),
                poles.join(", ")
            );
        }
    }
}

/// `design` subcommand: validates the frozen data against the synthesis
/// pipeline, then writes the design matrices and a frequency-response CSV
/// for the requested design (or all three).
pub fn cmd_design(cfg: &RunConfig, id: Option<u32>) -> Result<(), YcooError> {
    if let Some(i) = id {
        if !(1..=3).contains(&i) {
            return Err(YcooError::InvalidConfig {
                detail: format!("design id {i} out of range 1..=3"),
            });
        }
    }
    self_check(frozen_data())?;
    println!("frozen-data self-check: ok");
    cfg.ensure_out()?;
    let suite = published_design_suite();
    let params = VehicleParams::default();
    let ids: Vec<usize> = match id {
        Some(i) => vec![i as usize],
        None => vec![1, 2, 3],
    };
    for i in ids {
        let (op, dp) = &suite[i - 1];
        let res = design(op, dp, &params)?;
        let bw = bandwidth_report(&res)?;

        let mut text = String::new();
        let _ = writeln!(
            text,
            "design {i}: V0 = {} m/s, psi0 = {} deg\n\
             polynomial coefficients are ascending in s\n",
            op.v0,
            op.psi0.to_degrees().round()
        );
        format_matrix(&mut text, "G_p", &res.g_p);
        format_matrix(&mut text, "M_p", &res.smith.m_p);
        format_matrix(&mut text, "U_L", &res.smith.u_l);
        format_matrix(&mut text, "M_T", &res.m_t);
        format_matrix(&mut text, "M_Y", &res.m_y);
        format_matrix(&mut text, "Y", &res.y);
        format_matrix(&mut text, "T_y", &res.t_y);
        format_matrix(&mut text, "S_y", &res.s_y);
        format_matrix(&mut text, "G_c", &res.g_c);
        let _ = writeln!(
            text,
            "\nshaped crossovers (rad/s): {:?}\nraw crossovers (rad/s): {:?}",
            bw.shaped_crossover, bw.raw_crossover
        );
        let path = cfg.out.join(format!("design_{i}_matrices.txt"));
        std::fs::write(&path, &text)?;
        println!("wrote {}", path.display());

        let mut csv = String::from(
            "omega_rad_s,mag_MT_1,mag_MT_2,mag_Ty_11,mag_Ty_22,mag_Sy_11,mag_Sy_22\n",
        );
        let n = 400;
        for k in 0..n {
            let omega = 10f64.powf(-1.0 + 6.0 * k as f64 / (n - 1) as f64);
            let mt = res.m_t.freq_response(omega)?;
            let ty = res.t_y.freq_response(omega)?;
            let sy = res.s_y.freq_response(omega)?;
            let _ = writeln!(
                csv,
                "{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                omega,
                mt[(0, 0)].norm(),
                mt[(1, 1)].norm(),
                ty[(0, 0)].norm(),
                ty[(1, 1)].norm(),
                sy[(0, 0)].norm(),
                sy[(1, 1)].norm()
            );
        }
        let path = cfg.out.join(format!("design_{i}_response.csv"));
        std::fs::write(&path, &csv)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `simulate` subcommand: one closed-loop run per selected observer,
/// emitted as CSV (plus optional SVG plots).
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), YcooError> {
    cfg.ensure_out()?;
    let kind = cfg.scenarios(false)?[0];
    for obs in cfg.observers()? {
        let spec = cfg.spec(kind);
        let trace = crate::sim::run_closed_loop(&spec, obs)?;
        let stem = format!("{}_{}_seed{}", kind.name(), obs.name(), cfg.seed);
        let path = cfg.out.join(format!("{stem}.csv"));
        std::fs::write(&path, trace_to_csv(&trace))?;
        println!("wrote {} ({} rows)", path.display(), trace.rows.len());
        if cfg.plots {
            write_trace_plots(&cfg.out, &stem, &trace)?;
            println!("wrote {}/{stem}_{{path,errors}}.svg", cfg.out.display());
        }
    }
    Ok(())
}

/// `compare` subcommand: Monte-Carlo of both observers per scenario,
/// emitted as a JSON + text comparison report.
pub fn cmd_compare(cfg: &RunConfig) -> Result<(), YcooError> {
    if cfg.runs < 1 {
        return Err(YcooError::InvalidConfig {
            detail: "runs must be >= 1".into(),
        });
    }
    cfg.ensure_out()?;
    let tol = ToleranceSet::default();
    for kind in cfg.scenarios(true)? {
        let spec = cfg.spec(kind);
        let ycoo = monte_carlo(&spec, ObserverKind::Ycoo, cfg.runs, cfg.seed)?;
        let nl = monte_carlo(&spec, ObserverKind::Luenberger, cfg.runs, cfg.seed)?;
        let report = build_report(&ycoo, &nl, &tol)?;
        let text = render_report_text(&report);
        print!("{text}");
        let base = cfg.out.join(format!("compare_{}", kind.name()));
        std::fs::write(
            base.with_extension("json"),
            serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?,
        )?;
        std::fs::write(base.with_extension("txt"), &text)?;
        println!("wrote {}.{{json,txt}}", base.display());
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustnessRow {
    pub factor: f64,
    pub observer: String,
    pub rms_psi_deg: f64,
    pub rms_v_mps: f64,
    pub within_tolerance: bool,
}

/// `robustness` subcommand: noise-free wheelbase-mismatch sweep on the
/// double lane change (or the configured scenario), both observers.
pub fn cmd_robustness(cfg: &RunConfig) -> Result<(), YcooError> {
    if cfg.l_t_factors.is_empty() {
        return Err(YcooError::InvalidConfig {
            detail: "l_t_factors must be nonempty".into(),
        });
    }
    cfg.ensure_out()?;
    let kind = match &cfg.scenario {
        Some(name) => ScenarioKind::from_name(name)?,
        None => ScenarioKind::DoubleLaneChange,
    };
    let base = cfg.spec(kind);
    let tol = ToleranceSet::default();
    let mut rows = Vec::new();
    for obs in [ObserverKind::Ycoo, ObserverKind::Luenberger] {
        for (factor, trace) in robustness_sweep(&base, &cfg.l_t_factors, obs)? {
            let m = run_metrics(&trace);
            rows.push(RobustnessRow {
                factor,
                observer: obs.name().into(),
                rms_psi_deg: m.rms[1],
                rms_v_mps: m.rms[2],
                within_tolerance: m.rms[1] < tol.psi_deg && m.rms[2] < tol.v_mps,
            });
        }
    }
    let mut text = format!(
        "robustness sweep: {} (noise-free, observer params nominal)\n\
         {:<12} {:>8} {:>14} {:>14}\n",
        kind.name(),
        "observer",
        "l_t/l_t0",
        "RMS psi (deg)",
        "RMS V (m/s)"
    );
    for r in &rows {
        let flag = if r.within_tolerance { "  " } else { " !" };
        let _ = writeln!(
            text,
            "{:<12} {:>8.2} {:>14.6} {:>14.6}{}",
            r.observer, r.factor, r.rms_psi_deg, r.rms_v_mps, flag
        );
    }
    text.push_str("rows marked '!' exceed the 0.05 tolerance\n");
    print!("{text}");
    let base_path = cfg.out.join("robustness");
    std::fs::write(
        base_path.with_extension("json"),
        serde_json::to_string_pretty(&rows).map_err(std::io::Error::other)?,
    )?;
    std::fs::write(base_path.with_extension("txt"), &text)?;
    println!("wrote {}.{{json,txt}}", base_path.display());
    Ok(())
}

/// Single-observer summary path used by `compare` when only one observer is
/// selected (`--observer ycoo|luenberger`).
pub fn cmd_compare_single(cfg: &RunConfig, obs: ObserverKind) -> Result<(), YcooError> {
    cfg.ensure_out()?;
    let tol = ToleranceSet::default();
    for kind in cfg.scenarios(true)? {
        let spec = cfg.spec(kind);
        let traces = monte_carlo(&spec, obs, cfg.runs, cfg.seed)?;
        let summary = summarize(obs.name(), &traces, &tol);
        let text = render_summary_text(kind.name(), &summary);
        print!("{text}");
        let base = cfg.out.join(format!("summary_{}_{}", kind.name(), obs.name()));
        std::fs::write(
            base.with_extension("json"),
            serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?,
        )?;
        std::fs::write(base.with_extension("txt"), &text)?;
        println!("wrote {}.{{json,txt}}", base.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_cfg(sub: &str) -> RunConfig {
        RunConfig {
            out: std::env::temp_dir().join(format!("ycoo_cli_{sub}")),
            ..RunConfig::default()
        }
    }

    #[test]
    fn default_config_is_sane() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.runs, 30);
        assert_eq!(cfg.noise_variance(), 0.01);
        assert_eq!(cfg.observers().unwrap().len(), 2);
        assert_eq!(cfg.scenarios(true).unwrap().len(), 5);
        assert_eq!(cfg.scenarios(false).unwrap(), vec![ScenarioKind::Straight]);
    }

    #[test]
    fn toml_round_trip_and_psd_mode() {
        let cfg: RunConfig = toml::from_str(
            "scenario = \"left_turn\"\nobserver = \"ycoo\"\nruns = 3\nseed = 7\n\
             noise_mode = \"psd\"\nnoise_power = 1e-5\n",
        )
        .map_err(|e| panic!("{e}"))
        .unwrap();
        assert_eq!(cfg.runs, 3);
        assert!((cfg.noise_variance() - 1e-2).abs() < 1e-15);
        assert_eq!(cfg.scenarios(true).unwrap(), vec![ScenarioKind::LeftTurn]);
    }

    #[test]
    fn unknown_fields_and_values_are_rejected() {
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
        let cfg: RunConfig = toml::from_str("observer = \"kalman\"").unwrap();
        assert!(cfg.observers().is_err());
        let cfg: RunConfig = toml::from_str("scenario = \"zigzag\"").unwrap();
        assert!(cfg.scenarios(true).is_err());
    }

    #[test]
    fn simulate_writes_expected_row_counts_and_is_deterministic() {
        let mut cfg = temp_cfg("simulate");
        cfg.scenario = Some("straight".into());
        cfg.observer = "ycoo".into();
        cfg.seed = 1;
        cmd_simulate(&cfg).unwrap();
        let path = cfg.out.join("straight_ycoo_seed1.csv");
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body.lines().count(), 10_002); // header + 10^4 + 1 rows
        assert!(body.starts_with(CSV_HEADER));
        cmd_simulate(&cfg).unwrap();
        let body2 = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body, body2, "re-run is not byte-identical");
    }

    #[test]
    fn left_turn_row_count() {
        let mut cfg = temp_cfg("leftturn");
        cfg.scenario = Some("left_turn".into());
        cfg.observer = "luenberger".into();
        cmd_simulate(&cfg).unwrap();
        let body =
            std::fs::read_to_string(cfg.out.join("left_turn_luenberger_seed0.csv")).unwrap();
        assert_eq!(body.lines().count(), 20_002);
    }

    #[test]
    fn robustness_rejects_empty_factor_list() {
        let mut cfg = temp_cfg("rob_empty");
        cfg.l_t_factors.clear();
        assert!(matches!(
            cmd_robustness(&cfg),
            Err(YcooError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn design_rejects_bad_id() {
        let cfg = temp_cfg("design_bad");
        assert!(matches!(
            cmd_design(&cfg, Some(4)),
            Err(YcooError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn design_emits_matrices_and_response() {
        let cfg = temp_cfg("design_ok");
        cmd_design(&cfg, Some(1)).unwrap();
        let text = std::fs::read_to_string(cfg.out.join("design_1_matrices.txt")).unwrap();
        assert!(text.contains("G_c"));
        assert!(text.contains("shaped crossovers"));
        let csv = std::fs::read_to_string(cfg.out.join("design_1_response.csv")).unwrap();
        assert_eq!(csv.lines().count(), 401);
    }
}
