//! Exact polynomial arithmetic over the rationals.
//!
//! Cancellation claims in this crate are exact statements about Taylor
//! coefficients, so they are verified with arbitrary-precision rational
//! arithmetic; floating point only enters at final evaluation.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("division requires a nonzero constant term in the denominator")]
    ZeroConstantTerm,
}

/// Dense polynomial in p with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesPoly {
    /// coeffs[i] multiplies p^i; trailing zeros are trimmed.
    coeffs: Vec<BigRational>,
}

impl SeriesPoly {
    pub fn zero() -> Self {
        SeriesPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        SeriesPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut s = SeriesPoly { coeffs: vec![c] };
        s.trim();
        s
    }

    pub fn monomial(c: BigRational, power: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); power + 1];
        coeffs[power] = c;
        let mut s = SeriesPoly { coeffs };
        s.trim();
        s
    }

    /// Polynomial from integer coefficients of p^0, p^1, ...
    pub fn from_integers(coeffs: &[i64]) -> Self {
        let mut s = SeriesPoly {
            coeffs: coeffs
                .iter()
                .map(|&c| BigRational::from(BigInt::from(c)))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// (1 - p)^k expanded exactly.
    pub fn one_minus_p_pow(k: usize) -> Self {
        let base = SeriesPoly::from_integers(&[1, -1]);
        base.pow(k)
    }

    /// p^k (1 - p)^(n - k): the per-pattern weight probability P_k.
    pub fn weight_probability(n: usize, k: usize) -> Self {
        SeriesPoly::monomial(BigRational::one(), k).mul(&SeriesPoly::one_minus_p_pow(n - k))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of p^i (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            coeffs.push(self.coeff(i) + other.coeff(i));
        }
        let mut s = SeriesPoly { coeffs };
        s.trim();
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SeriesPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut s = SeriesPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        };
        s.trim();
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return SeriesPoly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let mut s = SeriesPoly { coeffs };
        s.trim();
        s
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = SeriesPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drop all terms above p^max_degree.
    pub fn truncate(&self, max_degree: usize) -> Self {
        let mut s = SeriesPoly {
            coeffs: self
                .coeffs
                .iter()
                .take(max_degree + 1)
                .cloned()
                .collect(),
        };
        s.trim();
        s
    }

    /// Taylor series of self/den around p = 0, exact to `order`.
    pub fn taylor_quotient(&self, den: &Self, order: usize) -> Result<Self, SeriesError> {
        let d0 = den.coeff(0);
        if d0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let mut acc = self.coeff(i);
            for (j, c) in out.iter().enumerate() {
                acc -= c * den.coeff(i - j);
            }
            out.push(acc / d0.clone());
        }
        let mut s = SeriesPoly { coeffs: out };
        s.trim();
        Ok(s)
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * p + rational_to_f64(c);
        }
        acc
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "p")?;
                    } else {
                        write!(f, "p^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
