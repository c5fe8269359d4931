//! Dense real polynomials with float-tolerant canonicalization.
//!
//! Coefficients are stored in ascending powers of `s` (`coeffs[k]` multiplies
//! `s^k`); display and serialization use descending powers, which is the
//! order control texts print transfer functions in.
//!
//! The zero polynomial is the canonical single-element sequence `[0.0]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Default relative tolerance for approximate-GCD remainder truncation.
pub const GCD_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming exactly-zero
    /// leading terms.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    /// Builds a polynomial from descending coefficients (print order).
    pub fn from_descending(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().rev().copied().collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![1.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Polynomial {
            coeffs: vec![0.0, 1.0],
        }
    }

    /// Builds `k * Π (s - r_i)` from real roots.
    pub fn from_real_roots(gain: f64, roots: &[f64]) -> Self {
        let mut p = Polynomial::constant(gain);
        for &r in roots {
            p = p.mul(&Polynomial::new(vec![-r, 1.0]));
        }
        p
    }

    /// Builds a real polynomial from a complex root multiset (conjugate pairs
    /// are combined into quadratic factors; tiny imaginary parts are dropped).
    pub fn from_complex_roots(gain: f64, roots: &[Complex64]) -> Self {
        let mut p = Polynomial::constant(gain);
        let mut remaining: Vec<Complex64> = roots.to_vec();
        while let Some(z) = remaining.pop() {
            let scale = z.norm().max(1.0);
            if z.im.abs() <= 1e-9 * scale {
                p = p.mul(&Polynomial::new(vec![-z.re, 1.0]));
            } else {
                // Find and consume the conjugate partner.
                let conj = z.conj();
                let (idx, _) = remaining
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        (a.1 - conj)
                            .norm()
                            .partial_cmp(&(b.1 - conj).norm())
                            .unwrap()
                    })
                    .expect("complex root without conjugate partner");
                remaining.swap_remove(idx);
                p = p.mul(&Polynomial::new(vec![z.norm_sqr(), -2.0 * z.re, 1.0]));
            }
        }
        p
    }

    // Only bitwise zeros are stripped. Magnitude-based trimming is unsafe
    // here: loop-shaping denominators legitimately span ~20 orders of
    // magnitude between the monic leading term and the constant, while true
    // leading-term cancellation in addition/subtraction is exact in floats
    // (equal coefficients subtract to 0.0). Near-cancellations that leave
    // dust are handled at the rational-function level by root pairing.
    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn eval_real(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(1.0 / self.leading())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Long division: returns `(quotient, remainder)` with
    /// `self = q*divisor + r`, `deg r < deg divisor`.
    ///
    /// # Panics
    /// Panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.degree() < divisor.degree() {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dn = divisor.degree();
        let lead = divisor.leading();
        let qn = self.degree() - dn + 1;
        let mut quot = vec![0.0; qn];
        for k in (0..qn).rev() {
            let q = rem[k + dn] / lead;
            quot[k] = q;
            for j in 0..=dn {
                rem[k + j] -= q * divisor.coeffs[j];
            }
        }
        rem.truncate(dn.max(1));
        (Self::new(quot), Self::new(rem))
    }

    /// Roots via eigenvalues of the companion matrix of the monic form.
    ///
    /// # Panics
    /// Panics on the zero polynomial. A constant has no roots.
    pub fn roots(&self) -> Vec<Complex64> {
        assert!(!self.is_zero(), "zero polynomial has no root multiset");
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![Complex64::new(-self.coeffs[0] / self.coeffs[1], 0.0)];
        }
        let monic = self.monic();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -monic.coeffs[i];
        }
        m.complex_eigenvalues().iter().copied().collect()
    }
}

impl std::fmt::Display for Polynomial {
    /// Descending-power display, e.g. `5.179s + 35.71`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 && self.degree() > 0 {
                continue;
            }
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => {
                    if a != 1.0 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "s")?;
                }
                _ => {
                    if a != 1.0 {
                        write!(f, "{a}")?;
                    }
                    write!(f, "s^{k}")?;
                }
            }
        }
        Ok(())
    }
}

/// Monic approximate GCD via the Euclidean remainder sequence.
///
/// A remainder is declared zero when its largest coefficient magnitude drops
/// below `tol` times the largest coefficient magnitude of the current
/// (monicized) dividend pair. The scale must come from the working monic
/// polynomials, not the raw inputs: a raw-input scale lets a huge leading
/// coefficient mask genuinely nonzero remainders of coprime factors.
pub fn poly_gcd(p: &Polynomial, q: &Polynomial, tol: f64) -> Polynomial {
    assert!(
        !(p.is_zero() && q.is_zero()),
        "gcd of two zero polynomials is undefined"
    );
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    let mut a = p.monic();
    let mut b = q.monic();
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0);
        let (_, r) = a.div_rem(&b);
        if r.is_zero() || r.max_abs_coeff() < tol * scale {
            return b.monic();
        }
        a = b;
        b = r.monic();
    }
}
