//! Elements `a + b*sqrt(d)` of a real quadratic extension of the rationals.
//!
//! A dimension certificate lives entirely inside a single field Q(sqrt(d)),
//! so surds are closed under ring operations only for a fixed radicand;
//! mixing radicands is a reported error, never a silent float fallback.

use super::rational::{dyadic_sqrt, is_perfect_square, rat_to_string, Rational};
use super::ExactError;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact sign of a quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }

    fn of_rational(x: &Rational) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// `a + b*sqrt(d)` with `a, b, d` rational and `d >= 0`.
///
/// Canonical form: `b == 0` implies `d == 0`, and a perfect-square radicand
/// is folded into the rational part on construction. Equality is structural
/// on the canonical fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    a: Rational,
    b: Rational,
    d: Rational,
}

impl Surd {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Result<Self, ExactError> {
        if d.is_negative() {
            return Err(ExactError::NegativeRadicand(rat_to_string(&d)));
        }
        Ok(Self::normalized(a, b, d))
    }

    fn normalized(mut a: Rational, mut b: Rational, mut d: Rational) -> Self {
        debug_assert!(!d.is_negative());
        if d.is_zero() {
            b = Rational::zero();
        } else if b.is_zero() {
            d = Rational::zero();
        } else if let Some(root) = is_perfect_square(&d) {
            a += &b * root;
            b = Rational::zero();
            d = Rational::zero();
        }
        Surd { a, b, d }
    }

    pub fn rational(a: Rational) -> Self {
        Surd {
            a,
            b: Rational::zero(),
            d: Rational::zero(),
        }
    }

    /// `sqrt(d)` as a surd; `d` must be non-negative.
    pub fn sqrt_of(d: Rational) -> Result<Self, ExactError> {
        Self::new(Rational::zero(), Rational::from_integer(1.into()), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &Rational {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign, by case split on the signs of `a` and `b`; the mixed case
    /// compares `a^2` against `b^2 d`. No floating point anywhere.
    pub fn sign(&self) -> Sign {
        if self.b.is_zero() {
            return Sign::of_rational(&self.a);
        }
        if self.a.is_zero() {
            return Sign::of_rational(&self.b);
        }
        let sa = Sign::of_rational(&self.a);
        let sb = Sign::of_rational(&self.b);
        if sa == sb {
            return sa;
        }
        // Opposite signs: |a| vs |b|sqrt(d) decides; equality would force d
        // to be a perfect square, which normalization has already removed.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * &self.d;
        match a2.cmp(&b2d) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => Sign::Zero,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    fn unify_radicand(&self, rhs: &Surd) -> Result<Rational, ExactError> {
        if self.b.is_zero() {
            Ok(rhs.d.clone())
        } else if rhs.b.is_zero() || self.d == rhs.d {
            Ok(self.d.clone())
        } else {
            Err(ExactError::MixedRadicands(
                rat_to_string(&self.d),
                rat_to_string(&rhs.d),
            ))
        }
    }

    pub fn checked_add(&self, rhs: &Surd) -> Result<Surd, ExactError> {
        let d = self.unify_radicand(rhs)?;
        Ok(Surd::normalized(&self.a + &rhs.a, &self.b + &rhs.b, d))
    }

    pub fn checked_sub(&self, rhs: &Surd) -> Result<Surd, ExactError> {
        self.checked_add(&rhs.neg())
    }

    pub fn checked_mul(&self, rhs: &Surd) -> Result<Surd, ExactError> {
        let d = self.unify_radicand(rhs)?;
        let a = &self.a * &rhs.a + &self.b * &rhs.b * &d;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(Surd::normalized(a, b, d))
    }

    /// Division by conjugate; fails on a zero divisor or mixed radicands.
    pub fn checked_div(&self, rhs: &Surd) -> Result<Surd, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let d = self.unify_radicand(rhs)?;
        // (a + b√d)(a' - b'√d) / (a'^2 - b'^2 d)
        let norm = &rhs.a * &rhs.a - &rhs.b * &rhs.b * &d;
        debug_assert!(!norm.is_zero(), "nonzero surd with zero field norm");
        let a = (&self.a * &rhs.a - &self.b * &rhs.b * &d) / &norm;
        let b = (&self.b * &rhs.a - &self.a * &rhs.b) / &norm;
        Ok(Surd::normalized(a, b, d))
    }

    pub fn neg(&self) -> Surd {
        Surd {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn conjugate(&self) -> Surd {
        Surd {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Surd {
        Surd::normalized(&self.a * c, &self.b * c, self.d.clone())
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }

    /// Dyadic approximation with error below `(1 + |b|) * 2^-bits`.
    pub fn to_dyadic(&self, bits: u32) -> Rational {
        if self.b.is_zero() {
            return self.a.clone();
        }
        let root = dyadic_sqrt(&self.d, bits).expect("radicand is non-negative");
        &self.a + &self.b * root
    }
}

impl From<Rational> for Surd {
    fn from(a: Rational) -> Self {
        Surd::rational(a)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", rat_to_string(&self.a));
        }
        write!(
            f,
            "{} + {}*sqrt({})",
            rat_to_string(&self.a),
            rat_to_string(&self.b),
            rat_to_string(&self.d)
        )
    }
}
