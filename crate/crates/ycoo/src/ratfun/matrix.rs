//! Rational transfer matrices.
//!
//! Convention: entry `(i, j)` maps input `j` to output `i`
//! (outputs-by-inputs). Texts that index rows by input are transposed on
//! ingestion.

use super::rational::RationalFunction;
use crate::error::YcooError;
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalFunction>, // row-major
}

impl TransferMatrix {
    pub fn from_rows(rows: Vec<Vec<RationalFunction>>) -> Self {
        let nrows = rows.len();
        assert!(nrows > 0, "empty matrix");
        let ncols = rows[0].len();
        assert!(
            rows.iter().all(|r| r.len() == ncols) && ncols > 0,
            "matrix must be rectangular and nonempty"
        );
        TransferMatrix {
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.entry_mut(i, i) = RationalFunction::one();
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        TransferMatrix {
            rows,
            cols,
            entries: vec![RationalFunction::zero(); rows * cols],
        }
    }

    pub fn diagonal(diag: Vec<RationalFunction>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, r) in diag.into_iter().enumerate() {
            *m.entry_mut(i, i) = r;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut RationalFunction {
        &mut self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.entry_mut(j, i) = self.entry(i, j).clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, YcooError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(YcooError::DimensionMismatch {
                context: "transfer-matrix addition",
            });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.entry_mut(i, j) = self.entry(i, j).add(other.entry(i, j));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, YcooError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(YcooError::DimensionMismatch {
                context: "transfer-matrix subtraction",
            });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.entry_mut(i, j) = self.entry(i, j).sub(other.entry(i, j));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, YcooError> {
        if self.cols != other.rows {
            return Err(YcooError::DimensionMismatch {
                context: "transfer-matrix product",
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RationalFunction::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.entry(i, k).mul(other.entry(k, j)));
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &RationalFunction) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.mul(k);
        }
        out
    }

    /// 2x2 inverse by adjugate over determinant.
    pub fn inverse_2x2(&self) -> Result<Self, YcooError> {
        if self.rows != 2 || self.cols != 2 {
            return Err(YcooError::DimensionMismatch {
                context: "2x2 inverse",
            });
        }
        let det = self
            .entry(0, 0)
            .mul(self.entry(1, 1))
            .sub(&self.entry(0, 1).mul(self.entry(1, 0)));
        if det.is_zero() {
            return Err(YcooError::SingularMatrix);
        }
        let inv_det = det.inv();
        Ok(Self::from_rows(vec![
            vec![
                self.entry(1, 1).mul(&inv_det),
                self.entry(0, 1).neg().mul(&inv_det),
            ],
            vec![
                self.entry(1, 0).neg().mul(&inv_det),
                self.entry(0, 0).mul(&inv_det),
            ],
        ]))
    }

    pub fn det_2x2(&self) -> Result<RationalFunction, YcooError> {
        if self.rows != 2 || self.cols != 2 {
            return Err(YcooError::DimensionMismatch { context: "2x2 determinant" });
        }
        Ok(self
            .entry(0, 0)
            .mul(self.entry(1, 1))
            .sub(&self.entry(0, 1).mul(self.entry(1, 0))))
    }

    /// Evaluates every entry at `s = jω`.
    ///
    /// # Errors
    /// Fails if any entry has a pole within 1e-9 of `jω`.
    pub fn freq_response(&self, omega: f64) -> Result<DMatrix<Complex64>, YcooError> {
        let s = Complex64::new(0.0, omega);
        let mut out = DMatrix::<Complex64>::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.entry(i, j);
                let d = e.den().eval(s);
                if d.norm() < 1e-9 * e.den().max_abs_coeff().max(1.0) {
                    return Err(YcooError::EvaluationAtPole { omega });
                }
                out[(i, j)] = e.num().eval(s) / d;
            }
        }
        Ok(out)
    }
}

impl std::fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ,  ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
