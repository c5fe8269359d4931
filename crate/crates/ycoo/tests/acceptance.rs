//! End-to-end acceptance suite. Each test checks one numbered acceptance
//! criterion and prints a single pass/fail line (run with `-- --nocapture`
//! to see them on success).

use num_complex::Complex64;
use std::time::Instant;

use ycoo::design::{bandwidth_report, check_interpolation, design, published_design_suite};
use ycoo::frozen::{frozen_data, self_check};
use ycoo::metrics::{run_metrics, summarize, ToleranceSet};
use ycoo::observers::verify_gain_stability;
use ycoo::sim::{build_scenario, monte_carlo, robustness_sweep, ObserverKind, ScenarioKind};
use ycoo::vehicle::VehicleParams;

fn report<F: FnOnce() -> Result<(), String>>(label: &str, f: F) {
    let t0 = Instant::now();
    let result = f();
    let dt = t0.elapsed().as_secs_f64();
    match result {
        Ok(()) => println!("acceptance {label}: PASS ({dt:.2} s)"),
        Err(e) => {
            println!("acceptance {label}: FAIL ({dt:.2} s) - {e}");
            panic!("acceptance {label} failed: {e}");
        }
    }
}

/// Matches two unordered sets of complex numbers within a relative tolerance.
fn match_set(expected: &[Complex64], actual: &[Complex64], rel: f64) -> Result<(), String> {
    if expected.len() != actual.len() {
        return Err(format!(
            "cardinality mismatch: {} vs {}",
            expected.len(),
            actual.len()
        ));
    }
    let mut used = vec![false; actual.len()];
    for e in expected {
        let tol = rel * e.norm().max(1.0);
        let hit = actual
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|a, b| {
                (a.1 - e).norm().partial_cmp(&(b.1 - e).norm()).unwrap()
            })
            .map(|(i, a)| ((a - e).norm(), i));
        match hit {
            Some((d, i)) if d <= tol => used[i] = true,
            Some((d, _)) => return Err(format!("no match for {e} (closest at distance {d})")),
            None => return Err("ran out of candidates".into()),
        }
    }
    Ok(())
}

#[test]
fn acceptance_01_controller_recovery() {
    report("01 controller recovery matches published factored forms", || {
        let t0 = Instant::now();
        let data = frozen_data();
        self_check(data).map_err(|e| e.to_string())?;
        let params = VehicleParams::default();
        for fd in &data.designs {
            let res = design(&fd.operating_point(), &fd.design_params(), &params)
                .map_err(|e| e.to_string())?;
            for e in &fd.entries {
                let act = res.g_c.entry(e.row, e.col);
                let gain = act.factored_gain();
                if (gain - e.gain).abs() > 0.01 * e.gain.abs() {
                    return Err(format!(
                        "design {} entry ({},{}) gain {gain} vs {}",
                        fd.id, e.row, e.col, e.gain
                    ));
                }
                let zexp: Vec<Complex64> =
                    e.zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect();
                let pexp: Vec<Complex64> =
                    e.poles.iter().map(|z| Complex64::new(z[0], z[1])).collect();
                match_set(&zexp, &act.zeros(), 0.01)
                    .map_err(|m| format!("design {} zeros ({},{}): {m}", fd.id, e.row, e.col))?;
                match_set(&pexp, &act.poles(), 0.01)
                    .map_err(|m| format!("design {} poles ({},{}): {m}", fd.id, e.row, e.col))?;
            }
        }
        let dt = t0.elapsed().as_secs_f64();
        if dt >= 1.0 {
            return Err(format!("took {dt:.2} s, budget is 1 s"));
        }
        Ok(())
    });
}

#[test]
fn acceptance_02_smith_mcmillan_form() {
    report("02 diagonalized plant has the published canonical form", || {
        let params = VehicleParams::default();
        let (op, dp) = published_design_suite()[0];
        let res = design(&op, &dp, &params).map_err(|e| e.to_string())?;
        let m_p = &res.smith.m_p;
        // Diagonal: 1/s^2 and (s + V0/l_r)/s^2 in some order.
        let zero_at = op.v0 / params.l_r;
        let mut seen = [false; 2];
        for ch in 0..2 {
            for other in 0..2 {
                if other != ch && !m_p.entry(ch, other).is_zero() {
                    return Err(format!("off-diagonal entry ({ch},{other}) nonzero"));
                }
            }
            let e = m_p.entry(ch, ch);
            let lead = e.den().leading();
            let den: Vec<f64> = e.den().coeffs().iter().map(|c| c / lead).collect();
            if den.len() != 3 || den[0].abs() > 1e-3 || den[1].abs() > 1e-3 {
                return Err(format!("channel {ch} denominator is not s^2: {den:?}"));
            }
            let num: Vec<f64> = e.num().coeffs().iter().map(|c| c / lead).collect();
            match num.len() {
                1 if (num[0] - 1.0).abs() <= 1e-3 => seen[0] = true,
                2 if (num[1] - 1.0).abs() <= 1e-3 && (num[0] - zero_at).abs() <= 1e-3 => {
                    seen[1] = true
                }
                _ => return Err(format!("channel {ch} numerator unexpected: {num:?}")),
            }
        }
        if !(seen[0] && seen[1]) {
            return Err("did not find both canonical diagonal entries".into());
        }
        // Unimodular sandwich reproduces the diagonal at probe frequencies.
        let sandwich = res
            .smith
            .u_l
            .mul(&res.g_p)
            .and_then(|m| m.mul(&res.smith.u_r))
            .map_err(|e| e.to_string())?;
        for k in 0..10 {
            let omega = 10f64.powf(-1.0 + 0.5 * k as f64);
            let lhs = sandwich.freq_response(omega).map_err(|e| e.to_string())?;
            let rhs = m_p.freq_response(omega).map_err(|e| e.to_string())?;
            let scale = rhs.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            for i in 0..2 {
                for j in 0..2 {
                    let d = (lhs[(i, j)] - rhs[(i, j)]).norm();
                    if d > 1e-6 * scale {
                        return Err(format!("sandwich mismatch ({i},{j}) at {omega}: {d:e}"));
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_03_interpolation_conditions() {
    report("03 interpolation conditions hold on both channels", || {
        let params = VehicleParams::default();
        for (op, dp) in published_design_suite() {
            let res = design(&op, &dp, &params).map_err(|e| e.to_string())?;
            let rep = check_interpolation(&res.m_t, &res.smith.m_p, &dp);
            if rep.channels.len() != 2 {
                return Err(format!("expected 2 constrained channels, got {}", rep.channels.len()));
            }
            for c in &rep.channels {
                if c.value_residual >= 1e-9 || c.derivative_residual >= 1e-9 {
                    return Err(format!(
                        "channel {} residuals: value {:e}, derivative {:e}",
                        c.channel, c.value_residual, c.derivative_residual
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_04_loop_bandwidths() {
    report("04 shaped crossovers sit at 500 and 30 rad/s within 10%", || {
        let params = VehicleParams::default();
        let suite = published_design_suite();
        // The nominal design must hit 500/30; the rotated designs ship
        // their own bandwidths and must hit those.
        if (suite[0].1.w1 - 500.0).abs() > 1e-9 || (suite[0].1.w2 - 30.0).abs() > 1e-9 {
            return Err(format!(
                "nominal design targets are {}/{}, expected 500/30",
                suite[0].1.w1, suite[0].1.w2
            ));
        }
        for (op, dp) in suite {
            let res = design(&op, &dp, &params).map_err(|e| e.to_string())?;
            let bw = bandwidth_report(&res).map_err(|e| e.to_string())?;
            let targets = [dp.w1, dp.w2];
            for ch in 0..2 {
                let got = bw.shaped_crossover[ch];
                if (got - targets[ch]).abs() > 0.10 * targets[ch] {
                    return Err(format!(
                        "psi0 {:.0} deg channel {ch}: crossover {got:.1} vs {}",
                        op.psi0.to_degrees(),
                        targets[ch]
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_05_baseline_gain_stability() {
    report("05 baseline observer gains stabilize the error dynamics", || {
        let t0 = Instant::now();
        let reports = verify_gain_stability(&VehicleParams::default());
        if reports.len() != 4 {
            return Err(format!("expected 4 gain sets, got {}", reports.len()));
        }
        for r in &reports {
            if !r.stable || r.max_real_part >= 0.0 {
                return Err(format!(
                    "gain set {} max Re(lambda) = {:e} over {} cases",
                    r.gain_id, r.max_real_part, r.cases
                ));
            }
        }
        let dt = t0.elapsed().as_secs_f64();
        if dt >= 10.0 {
            return Err(format!("took {dt:.2} s, budget is 10 s"));
        }
        Ok(())
    });
}

#[test]
fn acceptance_06_noise_free_tracking() {
    report("06 noise-free tracking errors stay inside tolerance", || {
        let tol = ToleranceSet::default();
        for kind in ScenarioKind::ALL {
            let mut spec = build_scenario(kind);
            spec.noise_variance = 0.0;
            spec.exact_init = true;
            let tr = ycoo::sim::run_closed_loop(&spec, ObserverKind::Ycoo)
                .map_err(|e| e.to_string())?;
            let m = run_metrics(&tr);
            let bounds = [tol.trajectory_m, tol.psi_deg, tol.v_mps];
            for (i, name) in ycoo::metrics::STATE_NAMES.iter().enumerate() {
                if m.rms[i] >= bounds[i] {
                    return Err(format!(
                        "{}: {name} RMS {:.4} exceeds {:.2}",
                        kind.name(),
                        m.rms[i],
                        bounds[i]
                    ));
                }
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_07_monte_carlo_comparison() {
    report("07 blended bank beats the baseline over 30 noisy runs", || {
        let t0 = Instant::now();
        let tol = ToleranceSet::default();
        for kind in ScenarioKind::ALL {
            let mut spec = build_scenario(kind);
            spec.seed = 42;
            let yc = monte_carlo(&spec, ObserverKind::Ycoo, 30, 42).map_err(|e| e.to_string())?;
            let nl =
                monte_carlo(&spec, ObserverKind::Luenberger, 30, 42).map_err(|e| e.to_string())?;
            let sy = summarize("ycoo", &yc, &tol);
            let sn = summarize("luenberger", &nl, &tol);
            for i in [1, 2] {
                if sy.mean_rms[i] > sn.mean_rms[i] {
                    return Err(format!(
                        "{}: {} mean RMS {:.4} above baseline {:.4}",
                        kind.name(),
                        ycoo::metrics::STATE_NAMES[i],
                        sy.mean_rms[i],
                        sn.mean_rms[i]
                    ));
                }
            }
            for i in 0..3 {
                if sy.mean_error_frequency_hz[i] > 0.5 * sn.mean_error_frequency_hz[i] {
                    return Err(format!(
                        "{}: {} error frequency {:.2} Hz above half of baseline {:.2} Hz",
                        kind.name(),
                        ycoo::metrics::STATE_NAMES[i],
                        sy.mean_error_frequency_hz[i],
                        sn.mean_error_frequency_hz[i]
                    ));
                }
            }
        }
        let dt = t0.elapsed().as_secs_f64();
        if dt >= 600.0 {
            return Err(format!("took {dt:.1} s, budget is 600 s"));
        }
        Ok(())
    });
}

#[test]
fn acceptance_08_wheelbase_robustness() {
    report("08 wheelbase mismatch leaves the bank inside tolerance", || {
        let tol = ToleranceSet::default();
        let base = build_scenario(ScenarioKind::DoubleLaneChange);
        let factors = [0.8, 1.2];
        let yc =
            robustness_sweep(&base, &factors, ObserverKind::Ycoo).map_err(|e| e.to_string())?;
        let nl = robustness_sweep(&base, &factors, ObserverKind::Luenberger)
            .map_err(|e| e.to_string())?;
        for ((f, ty), (_, tn)) in yc.iter().zip(&nl) {
            let my = run_metrics(ty);
            let mn = run_metrics(tn);
            if my.rms[1] >= tol.psi_deg || my.rms[2] >= tol.v_mps {
                return Err(format!(
                    "factor {f}: bank RMS psi {:.4} deg, V {:.4} m/s exceed tolerance",
                    my.rms[1], my.rms[2]
                ));
            }
            if mn.rms[1] < 5.0 * my.rms[1] {
                return Err(format!(
                    "factor {f}: baseline psi RMS {:.4} below 5x bank {:.4}",
                    mn.rms[1], my.rms[1]
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_09_bumpless_blending() {
    report("09 blending is convex, bumpless, and reaches the handover phase", || {
        let mut spec = build_scenario(ScenarioKind::LeftTurn);
        spec.seed = 42;
        let tr = ycoo::sim::run_closed_loop(&spec, ObserverKind::Ycoo).map_err(|e| e.to_string())?;
        // Rows before the measurement-based initialization completes carry
        // zero weights by construction; the criterion applies from there on.
        let start = tr
            .rows
            .iter()
            .position(|r| r.weights.iter().sum::<f64>() > 0.0)
            .ok_or("observer never initialized")?;
        let rows = &tr.rows[start..];
        let mut saw_handover = false;
        for r in rows {
            let sum: f64 = r.weights.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(format!("weights sum {sum} at t = {}", r.t));
            }
            if r.weights[0] == 0.0 && r.weights[1] > 1e-9 && r.weights[2] > 1e-9 {
                saw_handover = true;
            }
        }
        if !saw_handover {
            return Err("never reached the second-to-third handover phase".into());
        }
        // The blended control estimate must not jump more across blend
        // windows than it does inside single-observer regions.
        let in_blend = |w: &[f64; 3]| w.iter().filter(|&&x| x > 1e-9).count() >= 2;
        let mut max_blend = 0.0f64;
        let mut max_single = 0.0f64;
        for pair in rows.windows(2) {
            let jump = (pair[1].input_est.delta_f - pair[0].input_est.delta_f)
                .hypot(pair[1].input_est.a - pair[0].input_est.a);
            if in_blend(&pair[0].weights) || in_blend(&pair[1].weights) {
                max_blend = max_blend.max(jump);
            } else if pair[0].region == pair[1].region {
                max_single = max_single.max(jump);
            }
        }
        if max_single <= 0.0 {
            return Err("no single-region activity to compare against".into());
        }
        if max_blend > 5.0 * max_single {
            return Err(format!(
                "blend-window jump {max_blend:.4} exceeds 5x single-region jump {max_single:.4}"
            ));
        }
        Ok(())
    });
}

#[test]
fn acceptance_10_invariant_suites() {
    report("10 per-module invariant checks complete inside their budgets", || {
        use ycoo::metrics::{rms, welch_p_value};
        use ycoo::observers::select_weights;
        use ycoo::ratfun::{rat_canonicalize, Polynomial, RationalFunction};
        use ycoo::vehicle::{dynamics, jacobian_a, ControlInput, VehicleState};

        let suites: Vec<(&str, Box<dyn FnOnce() -> Result<(), String>>)> = vec![
            ("ratfun", Box::new(|| {
                let r = RationalFunction::new(
                    Polynomial::from_real_roots(2.0, &[-1.0, -4.0]),
                    Polynomial::from_real_roots(1.0, &[-2.0, -3.0, -5.0]),
                );
                let once = rat_canonicalize(&r, 1e-9);
                let twice = rat_canonicalize(&once, 1e-9);
                for (a, b) in once
                    .num()
                    .coeffs()
                    .iter()
                    .zip(twice.num().coeffs())
                    .chain(once.den().coeffs().iter().zip(twice.den().coeffs()))
                {
                    if (a - b).abs() > 1e-9 {
                        return Err("canonicalization is not idempotent".into());
                    }
                }
                Ok(())
            })),
            ("vehicle", Box::new(|| {
                let s = VehicleState::new(1.0, -2.0, 9.0, 0.7);
                let u = ControlInput::new(0.1, 0.5);
                let p = VehicleParams::default();
                let a = jacobian_a(&s, &u, &p);
                let h = 1e-6;
                for col in 0..4 {
                    let mut sp = s.as_array();
                    let mut sm = s.as_array();
                    sp[col] += h;
                    sm[col] -= h;
                    let fp = dynamics(&VehicleState::from_array(sp), &u, &p);
                    let fm = dynamics(&VehicleState::from_array(sm), &u, &p);
                    for row in 0..4 {
                        if (a[(row, col)] - (fp[row] - fm[row]) / (2.0 * h)).abs() > 1e-5 {
                            return Err(format!("Jacobian mismatch at ({row},{col})"));
                        }
                    }
                }
                Ok(())
            })),
            ("design", Box::new(|| {
                let (op, dp) = published_design_suite()[0];
                let res = design(&op, &dp, &VehicleParams::default()).map_err(|e| e.to_string())?;
                for &omega in &[0.5, 5.0, 50.0, 500.0] {
                    let t = res.t_y.freq_response(omega).map_err(|e| e.to_string())?;
                    let s = res.s_y.freq_response(omega).map_err(|e| e.to_string())?;
                    for i in 0..2 {
                        for j in 0..2 {
                            let expect = if i == j { 1.0 } else { 0.0 };
                            if (t[(i, j)] + s[(i, j)] - Complex64::new(expect, 0.0)).norm() > 1e-8 {
                                return Err(format!("T + S != I at {omega}"));
                            }
                        }
                    }
                }
                Ok(())
            })),
            ("observers", Box::new(|| {
                let d = frozen_data();
                for k in 0..3600 {
                    let w = select_weights(k as f64 * 0.1, d);
                    if (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                        return Err(format!("weights do not sum to one at {}", k as f64 * 0.1));
                    }
                }
                Ok(())
            })),
            ("sim", Box::new(|| {
                let mut spec = build_scenario(ScenarioKind::Straight);
                spec.duration = 1.0;
                let a = ycoo::sim::run_closed_loop(&spec, ObserverKind::Ycoo)
                    .map_err(|e| e.to_string())?;
                let b = ycoo::sim::run_closed_loop(&spec, ObserverKind::Ycoo)
                    .map_err(|e| e.to_string())?;
                for (ra, rb) in a.rows.iter().zip(&b.rows) {
                    if ra.estimate.x.to_bits() != rb.estimate.x.to_bits() {
                        return Err("simulation is not deterministic".into());
                    }
                }
                Ok(())
            })),
            ("metrics", Box::new(|| {
                let xs = [1.0, -2.0, 3.0, -0.5];
                if (rms(&xs.map(|x| 3.0 * x)) - 3.0 * rms(&xs)).abs() > 1e-12 {
                    return Err("RMS scale equivariance fails".into());
                }
                let a = [1.0, 2.0, 3.0, 4.0, 5.0];
                let b = [2.0, 3.0, 4.0, 5.0, 6.0];
                let p = welch_p_value(&a, &b);
                if (p - 0.34659350708733416).abs() > 1e-12 {
                    return Err(format!("Welch p-value {p} off the reference"));
                }
                Ok(())
            })),
        ];
        for (name, f) in suites {
            let t0 = Instant::now();
            f().map_err(|e| format!("{name}: {e}"))?;
            let dt = t0.elapsed().as_secs_f64();
            if dt >= 60.0 {
                return Err(format!("{name} took {dt:.1} s, budget is 60 s"));
            }
        }
        Ok(())
    });
}
