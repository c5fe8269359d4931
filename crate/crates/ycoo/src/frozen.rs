//! Published reference data (factored observer entries, Luenberger gains,
//! blending tables), embedded at compile time and verified against the
//! synthesis pipeline by [`self_check`].

use crate::design::{design, DesignParams, OperatingPoint};
use crate::error::YcooError;
use crate::ratfun::RationalFunction;
use crate::vehicle::VehicleParams;
use num_complex::Complex64;
use serde::Deserialize;
use std::sync::OnceLock;

const FROZEN_TOML: &str = include_str!("../assets/frozen_design.toml");

/// Relative tolerance for gain/zero/pole agreement with the published
/// factored forms (they are printed to 4-5 significant digits).
const FACTOR_TOL: f64 = 0.01;

/// Relative tolerance for frequency-response agreement at the probe
/// frequencies.
const RESPONSE_TOL: f64 = 0.005;

const PROBES: [f64; 3] = [1.0, 10.0, 100.0];

#[derive(Clone, Debug, Deserialize)]
pub struct FrozenData {
    pub version: u32,
    pub designs: Vec<FrozenDesign>,
    pub observer_ranges: ObserverRanges,
    pub blend_tables: Vec<BlendTable>,
    pub luenberger_gains: Vec<LuenbergerGainSet>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct FrozenDesign {
    pub id: u32,
    pub psi0_deg: f64,
    pub v0: f64,
    pub w: [f64; 2],
    pub tau: f64,
    pub rolloff: [u32; 2],
    pub entries: Vec<FrozenEntry>,
}

impl FrozenDesign {
    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint::new(self.v0, self.psi0_deg, 0.0)
    }

    pub fn design_params(&self) -> DesignParams {
        DesignParams::new(self.w[0], self.w[1], self.tau, self.rolloff)
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct FrozenEntry {
    pub row: usize,
    pub col: usize,
    pub gain: f64,
    pub zeros: Vec<[f64; 2]>,
    pub poles: Vec<[f64; 2]>,
}

impl FrozenEntry {
    fn zeros_c(&self) -> Vec<Complex64> {
        self.zeros.iter().map(|z| Complex64::new(z[0], z[1])).collect()
    }

    fn poles_c(&self) -> Vec<Complex64> {
        self.poles.iter().map(|z| Complex64::new(z[0], z[1])).collect()
    }

    /// Evaluates the factored form at `s = j omega`.
    pub fn eval(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(0.0, omega);
        let mut v = Complex64::new(self.gain, 0.0);
        for z in self.zeros_c() {
            v *= s - z;
        }
        for p in self.poles_c() {
            v /= s - p;
        }
        v
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ObserverRanges {
    pub obs1: [f64; 2],
    pub obs2: [f64; 2],
    pub obs3: [f64; 2],
}

impl ObserverRanges {
    pub fn range(&self, observer: usize) -> [f64; 2] {
        match observer {
            1 => self.obs1,
            2 => self.obs2,
            3 => self.obs3,
            _ => panic!("observer index must be 1..=3"),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct BlendTable {
    pub from_observer: usize,
    pub to_observer: usize,
    pub psi_deg: Vec<f64>,
    pub rms_from: Vec<f64>,
    pub rms_to: Vec<f64>,
}

impl BlendTable {
    /// Weight of the `from` observer at heading `psi_deg` (linear
    /// interpolation on the published grid, clamped at the ends).
    pub fn weight_from(&self, psi_deg: f64) -> f64 {
        let n = self.psi_deg.len();
        let w = |i: usize| self.rms_to[i] / (self.rms_from[i] + self.rms_to[i]);
        if psi_deg <= self.psi_deg[0] {
            return w(0);
        }
        if psi_deg >= self.psi_deg[n - 1] {
            return w(n - 1);
        }
        let i = self
            .psi_deg
            .windows(2)
            .position(|p| psi_deg >= p[0] && psi_deg <= p[1])
            .unwrap();
        let t = (psi_deg - self.psi_deg[i]) / (self.psi_deg[i + 1] - self.psi_deg[i]);
        w(i) * (1.0 - t) + w(i + 1) * t
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct LuenbergerGainSet {
    pub id: u32,
    pub region_deg: [f64; 2],
    pub l: [[f64; 2]; 4],
}

/// Parses and returns the embedded reference data (cached after first use).
pub fn frozen_data() -> &'static FrozenData {
    static DATA: OnceLock<FrozenData> = OnceLock::new();
    DATA.get_or_init(|| {
        let d: FrozenData =
            toml::from_str(FROZEN_TOML).expect("embedded reference data must parse");
        validate_shape(&d).expect("embedded reference data must be well-formed");
        d
    })
}

fn validate_shape(d: &FrozenData) -> Result<(), YcooError> {
    let fail = |detail: String| Err(YcooError::FrozenDataMismatch { detail });
    if d.version != 1 {
        return fail(format!("unsupported data version {}", d.version));
    }
    if d.designs.len() != 3 {
        return fail(format!("expected 3 designs, found {}", d.designs.len()));
    }
    if d.luenberger_gains.len() != 4 {
        return fail(format!(
            "expected 4 baseline gain sets, found {}",
            d.luenberger_gains.len()
        ));
    }
    for t in &d.blend_tables {
        if t.psi_deg.len() != t.rms_from.len() || t.psi_deg.len() != t.rms_to.len() {
            return fail(format!(
                "blend table {}->{} has ragged columns",
                t.from_observer, t.to_observer
            ));
        }
        if !t.psi_deg.windows(2).all(|p| p[1] > p[0]) {
            return fail(format!(
                "blend table {}->{} grid is not increasing",
                t.from_observer, t.to_observer
            ));
        }
        if t.rms_from.iter().chain(&t.rms_to).any(|&r| r <= 0.0) {
            return fail(format!(
                "blend table {}->{} has non-positive errors",
                t.from_observer, t.to_observer
            ));
        }
    }
    for g in &d.luenberger_gains {
        let [lo, hi] = g.region_deg;
        if hi - lo != 120.0 {
            return fail(format!("baseline gain {} region is not 120 degrees wide", g.id));
        }
    }
    Ok(())
}

/// Matches each value in `want` to the nearest one in `got` (consuming it)
/// within the relative tolerance.
fn match_roots(want: &[Complex64], got: &[Complex64], what: &str) -> Result<(), YcooError> {
    if want.len() != got.len() {
        return Err(YcooError::FrozenDataMismatch {
            detail: format!("{what}: expected {} roots, found {}", want.len(), got.len()),
        });
    }
    let mut pool = got.to_vec();
    for w in want {
        let (i, best) = pool
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - w).norm().partial_cmp(&(b.1 - w).norm()).unwrap())
            .map(|(i, v)| (i, *v))
            .ok_or_else(|| YcooError::FrozenDataMismatch {
                detail: format!("{what}: root pool exhausted"),
            })?;
        if (best - w).norm() > FACTOR_TOL * w.norm().max(1.0) {
            return Err(YcooError::FrozenDataMismatch {
                detail: format!("{what}: no match for root {w} (nearest {best})"),
            });
        }
        pool.swap_remove(i);
    }
    Ok(())
}

fn check_entry(e: &FrozenEntry, got: &RationalFunction, ctx: &str) -> Result<(), YcooError> {
    let gain = got.factored_gain();
    if ((gain - e.gain) / e.gain).abs() > FACTOR_TOL {
        return Err(YcooError::FrozenDataMismatch {
            detail: format!("{ctx}: gain {gain:e} vs published {:e}", e.gain),
        });
    }
    match_roots(&e.zeros_c(), &got.zeros(), &format!("{ctx} zeros"))?;
    match_roots(&e.poles_c(), &got.poles(), &format!("{ctx} poles"))?;
    for &w in &PROBES {
        let a = e.eval(w);
        let b = got.eval(Complex64::new(0.0, w));
        if (a - b).norm() > RESPONSE_TOL * a.norm().max(1e-12) {
            return Err(YcooError::FrozenDataMismatch {
                detail: format!("{ctx}: response at {w} rad/s differs ({a} vs {b})"),
            });
        }
    }
    Ok(())
}

/// Re-runs the synthesis pipeline for each frozen design and verifies the
/// observer transfer matrix against the published factored entries.
pub fn self_check(data: &FrozenData) -> Result<(), YcooError> {
    let params = VehicleParams::default();
    for fd in &data.designs {
        let res = design(&fd.operating_point(), &fd.design_params(), &params)?;
        let mut listed = vec![[false; 2]; 2];
        for e in &fd.entries {
            listed[e.row][e.col] = true;
            let ctx = format!("design {} entry ({},{})", fd.id, e.row, e.col);
            check_entry(e, res.g_c.entry(e.row, e.col), &ctx)?;
        }
        for i in 0..2 {
            for j in 0..2 {
                if !listed[i][j] && !res.g_c.entry(i, j).is_zero() {
                    return Err(YcooError::FrozenDataMismatch {
                        detail: format!(
                            "design {} entry ({i},{j}) should vanish but does not",
                            fd.id
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}
