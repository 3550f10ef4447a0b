use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact value of a finite `f64` (every double is a dyadic rational).
pub fn exact_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial with exact rational coefficients, lowest degree first.
/// Trailing zero coefficients are trimmed, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// `p(0)`.
    pub fn value_at_zero(&self) -> Rational {
        self.coeff(0)
    }

    /// `p'(0)`.
    pub fn slope_at_zero(&self) -> Rational {
        self.coeff(1)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_abs_coeff(&self) -> Rational {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Floating-point copy for quadrature.
    pub fn to_f64(&self) -> FloatPoly {
        FloatPoly(self.coeffs.iter().map(to_f64).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// `f64` polynomial, Horner evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly(pub Vec<f64>);

impl FloatPoly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p, Poly::from_ints(&[1]));
        assert_eq!(p.degree(), Some(0));
        assert_eq!(Poly::from_ints(&[0, 0]).degree(), None);
    }

    #[test]
    fn arithmetic() {
        let p = Poly::from_ints(&[1, 2]); // 1 + 2x
        let q = Poly::from_ints(&[0, 0, 3]); // 3x²
        assert_eq!(&p + &q, Poly::from_ints(&[1, 2, 3]));
        assert_eq!(&p - &p, Poly::zero());
        assert_eq!(&p * &q, Poly::from_ints(&[0, 0, 3, 6]));
        assert_eq!(q.derivative(), Poly::from_ints(&[0, 6]));
        assert_eq!(q.derivative().derivative(), Poly::from_ints(&[6]));
        assert_eq!(p.eval(&rational(1, 2)), int(2));
    }

    #[test]
    fn exact_float_conversion() {
        assert_eq!(exact_from_f64(0.5), Some(rational(1, 2)));
        assert_eq!(exact_from_f64(-5.0), Some(int(-5)));
        assert_eq!(exact_from_f64(f64::INFINITY), None);
    }

    #[test]
    fn float_copy_matches() {
        let p = Poly::new(vec![rational(1, 3), rational(-7, 2), int(4)]);
        let x = 0.3;
        let want = 1.0 / 3.0 - 3.5 * x + 4.0 * x * x;
        assert!((p.to_f64().eval(x) - want).abs() < 1e-15);
    }
}
