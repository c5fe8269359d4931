//! State-space realization of rational transfer matrices.
//!
//! Each entry is realized in controllable canonical form and the subsystems
//! are stacked block-diagonally; entry (i, j) is driven by input j and its
//! output is summed into output i.

use crate::error::YcooError;
use crate::ratfun::TransferMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Continuous- or discrete-time linear system `(A, B, C, D)`.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn ninputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn noutputs(&self) -> usize {
        self.c.nrows()
    }

    /// `C (jwI - A)^{-1} B + D`.
    pub fn freq_response(&self, omega: f64) -> Result<DMatrix<Complex64>, YcooError> {
        let n = self.order();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(-self.a[(i, j)], if i == j { omega } else { 0.0 });
            }
        }
        let inv = m.try_inverse().ok_or(YcooError::EvaluationAtPole { omega })?;
        let cc = self.c.map(|v| Complex64::new(v, 0.0));
        let bc = self.b.map(|v| Complex64::new(v, 0.0));
        let dc = self.d.map(|v| Complex64::new(v, 0.0));
        Ok(&cc * inv * &bc + dc)
    }
}

/// Realizes a proper transfer matrix entry-by-entry.
///
/// # Errors
/// Fails with [`YcooError::ImproperEntry`] if any entry has numerator degree
/// above its denominator degree.
pub fn realize(g: &TransferMatrix) -> Result<StateSpace, YcooError> {
    let (p, q) = (g.nrows(), g.ncols());
    // First pass: per-entry canonical forms.
    struct Block {
        row: usize,
        col: usize,
        a: DMatrix<f64>,
        c_row: Vec<f64>,
    }
    let mut blocks = Vec::new();
    let mut total = 0usize;
    let mut d_total = DMatrix::<f64>::zeros(p, q);
    for i in 0..p {
        for j in 0..q {
            let e = g.entry(i, j);
            if e.is_zero() {
                continue;
            }
            let den = e.den();
            let k = den.degree();
            if e.num().degree() > k {
                return Err(YcooError::ImproperEntry {
                    i,
                    j,
                    num_deg: e.num().degree(),
                    den_deg: k,
                });
            }
            let lead = den.leading();
            let dmon: Vec<f64> = den.coeffs().iter().map(|c| c / lead).collect();
            let mut nmon = vec![0.0; k + 1];
            for (idx, c) in e.num().coeffs().iter().enumerate() {
                nmon[idx] = c / lead;
            }
            let d = nmon[k];
            d_total[(i, j)] += d;
            if k == 0 {
                continue; // static entry, no states
            }
            // Strictly proper remainder n'(s) = n(s) - d * den(s).
            let c_row: Vec<f64> = (0..k).map(|idx| nmon[idx] - d * dmon[idx]).collect();
            let mut a = DMatrix::<f64>::zeros(k, k);
            for r in 0..k.saturating_sub(1) {
                a[(r, r + 1)] = 1.0;
            }
            for cidx in 0..k {
                a[(k - 1, cidx)] = -dmon[cidx];
            }
            blocks.push(Block { row: i, col: j, a, c_row });
            total += k;
        }
    }
    let mut a = DMatrix::<f64>::zeros(total, total);
    let mut b = DMatrix::<f64>::zeros(total, q);
    let mut c = DMatrix::<f64>::zeros(p, total);
    let mut off = 0usize;
    for blk in &blocks {
        let k = blk.a.nrows();
        a.view_mut((off, off), (k, k)).copy_from(&blk.a);
        b[(off + k - 1, blk.col)] = 1.0;
        for idx in 0..k {
            c[(blk.row, off + idx)] = blk.c_row[idx];
        }
        off += k;
    }
    Ok(StateSpace { a, b, c, d: d_total })
}
