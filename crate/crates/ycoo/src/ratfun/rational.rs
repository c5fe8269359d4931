//! Rational functions of `s` with numerically tolerant canonicalization.
//!
//! Canonical form: monic denominator, common numerator/denominator roots
//! cancelled by nearest-distance pairing, the zero function stored as `0/1`.
//! Every cancellation is verified by value preservation at a fixed set of
//! probe frequencies; if the simplified function deviates, the cancellation
//! is rolled back. This makes the algebra safe against accidental
//! cancellation of nearby-but-distinct roots.

use super::poly::{poly_gcd, Polynomial, GCD_TOL};
use num_complex::Complex64;

/// Default relative tolerance for pole/zero cancellation.
pub const CANCEL_TOL: f64 = 1e-8;

/// Probe frequencies (rad/s) used to verify that canonicalization preserves
/// the function value. Chosen log-spaced and away from every pole this
/// artifact produces (origin poles are handled separately).
const PROBES: [f64; 8] = [0.013, 0.17, 1.3, 7.7, 41.0, 210.0, 1100.0, 5300.0];

/// Relative threshold below which a constant coefficient is treated as an
/// exact origin root during canonicalization.
const ORIGIN_REL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Creates and canonicalizes `num/den`.
    ///
    /// # Panics
    /// Panics if `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "denominator must be nonzero");
        canonicalize(
            RationalFunction { num, den },
            CANCEL_TOL,
        )
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunction {
            num: Polynomial::one(),
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: f64) -> Self {
        RationalFunction {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Relative degree `deg(den) - deg(num)`; ≥ 0 means proper.
    pub fn relative_degree(&self) -> i64 {
        self.den.degree() as i64 - self.num.degree() as i64
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.scale(-1.0),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Pre-cancel the shared denominator factor so the common denominator
        // stays as small as the algebra allows.
        let g = poly_gcd(&self.den, &other.den, GCD_TOL);
        let (da, _) = self.den.div_rem(&g);
        let (db, _) = other.den.div_rem(&g);
        let num = self.num.mul(&db).add(&other.num.mul(&da));
        let den = self.den.mul(&db);
        // Catastrophic cancellation check: if the sum collapsed to float dust
        // relative to the addend scale, the true result is zero.
        let scale = self
            .num
            .mul(&db)
            .max_abs_coeff()
            .max(other.num.mul(&da).max_abs_coeff());
        if num.max_abs_coeff() < 1e-10 * scale {
            return Self::zero();
        }
        Self::new(num, den)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // Cross-cancel common factors before multiplying so degrees (and
        // rounding error) do not balloon.
        let g1 = poly_gcd(&self.num, &other.den, GCD_TOL);
        let g2 = poly_gcd(&other.num, &self.den, GCD_TOL);
        let (n1, _) = self.num.div_rem(&g1);
        let (d2, _) = other.den.div_rem(&g1);
        let (n2, _) = other.num.div_rem(&g2);
        let (d1, _) = self.den.div_rem(&g2);
        Self::new(n1.mul(&n2), d1.mul(&d2))
    }

    /// Reciprocal.
    ///
    /// # Panics
    /// Panics on the zero function.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "cannot invert the zero function");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        if self.num.is_zero() || self.num.degree() == 0 {
            return Vec::new();
        }
        self.num.roots()
    }

    /// Leading-coefficient ratio: the gain multiplying the monic
    /// zero/pole factorization.
    pub fn factored_gain(&self) -> f64 {
        self.num.leading() / self.den.leading()
    }
}

impl std::fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.degree() == 0 && self.den.leading() == 1.0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Canonicalizes a rational function: strips shared origin roots, cancels
/// common roots within `tol` (paired by nearest distance), normalizes the
/// denominator to monic form, and verifies value preservation at probe
/// frequencies (reverting the root cancellation if it changed the function).
pub fn rat_canonicalize(r: &RationalFunction, tol: f64) -> RationalFunction {
    canonicalize(r.clone(), tol)
}

fn count_origin_roots(p: &Polynomial) -> usize {
    let scale = p.max_abs_coeff();
    if scale == 0.0 {
        return 0;
    }
    p.coeffs()
        .iter()
        .take(p.degree()) // never classify the leading coefficient
        .take_while(|c| c.abs() <= ORIGIN_REL * scale)
        .count()
}

fn shift_down(p: &Polynomial, k: usize) -> Polynomial {
    Polynomial::new(p.coeffs()[k..].to_vec())
}

fn canonicalize(r: RationalFunction, tol: f64) -> RationalFunction {
    if r.num.is_zero() {
        return RationalFunction::zero();
    }
    let mut num = r.num;
    let mut den = r.den;

    // Shared origin roots cancel exactly.
    let k = count_origin_roots(&num).min(count_origin_roots(&den));
    if k > 0 {
        num = shift_down(&num, k);
        den = shift_down(&den, k);
    }

    let fallback = RationalFunction {
        num: num.scale(1.0 / den.leading()),
        den: den.monic(),
    };

    if num.degree() == 0 || den.degree() == 0 {
        return fallback;
    }

    // Nearest-distance root pairing.
    let zeros = num.roots();
    let mut poles = den.roots();
    let mut kept_zeros: Vec<Complex64> = Vec::new();
    let mut cancelled = 0usize;
    for z in zeros {
        let nearest = poles
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - z).norm().partial_cmp(&(b.1 - z).norm()).unwrap())
            .map(|(i, p)| (i, *p));
        match nearest {
            Some((i, p)) if (p - z).norm() <= tol * z.norm().max(1.0) => {
                poles.swap_remove(i);
                cancelled += 1;
            }
            _ => kept_zeros.push(z),
        }
    }
    if cancelled == 0 {
        return fallback;
    }

    let gain = num.leading() / den.leading();
    let new_num = Polynomial::from_complex_roots(gain, &kept_zeros);
    let new_den = Polynomial::from_complex_roots(1.0, &poles);
    let candidate = RationalFunction {
        num: new_num,
        den: new_den,
    };

    // Value-preservation check at probe frequencies.
    for &w in &PROBES {
        let s = Complex64::new(0.0, w);
        let a = fallback.eval(s);
        let b = candidate.eval(s);
        if (a - b).norm() > 1e-6 * a.norm().max(1e-12) {
            return fallback;
        }
    }
    candidate
}
