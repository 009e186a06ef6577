//! Univariate polynomials over an exact coefficient ring.
//!
//! The same machinery serves three coefficient rings: rationals (the
//! checkpoint polynomials), surds (the certified coefficient a0 lives in
//! Q(sqrt(d))) and rational polynomials themselves (needed to compare two
//! derivations of a quadratic in a0 coefficient-by-coefficient).

use super::rational::Rational;
use super::surd::Surd;
use super::ExactError;
use num_traits::{ToPrimitive, Zero};

/// Minimal exact-ring interface for polynomial coefficients.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn neg_ref(&self) -> Self {
        Self::zero().sub_ref(self)
    }

    fn mul_int(&self, k: i64) -> Self {
        self.mul_ref(&Self::from_rational(&Rational::from_integer(k.into())))
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        Rational::from_integer(1.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// Ring operations panic on mixed radicands; fallible call sites use the
/// `checked_*` methods on [`Surd`] directly. Everything in this crate works
/// inside one fixed Q(sqrt(d)) at a time.
impl Ring for Surd {
    fn zero() -> Self {
        Surd::rational(<Rational as Zero>::zero())
    }
    fn one() -> Self {
        Surd::rational(Rational::from_integer(1.into()))
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("mixed radicands")
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("mixed radicands")
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("mixed radicands")
    }
    fn from_rational(r: &Rational) -> Self {
        Surd::rational(r.clone())
    }
}

impl<T: Ring> Ring for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn from_rational(r: &Rational) -> Self {
        Poly::constant(T::from_rational(r))
    }
}

/// Dense univariate polynomial, coefficients ascending by degree, highest
/// stored coefficient nonzero. The zero polynomial stores nothing and has
/// degree `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type RatPoly = Poly<Rational>;
pub type SurdPoly = Poly<Surd>;

impl<T: Ring> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn identity() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// Horner evaluation, exact.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// Exact formal derivative.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.mul_int(k as i64))
            .collect();
        Poly::new(coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add_ref(&rhs.coeff(i))).collect();
        Poly::new(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub_ref(&rhs.coeff(i))).collect();
        Poly::new(coeffs)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(Ring::neg_ref).collect())
    }

    /// Multiplication by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Poly::constant(T::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// `b^2 - 4ac` of `a x^2 + b x + c`, taken on the polynomial exactly as
    /// given (no monic rescaling); requires degree 2.
    pub fn quadratic_discriminant(&self) -> Result<T, ExactError> {
        if self.degree() != Some(2) {
            return Err(ExactError::NotQuadratic(self.degree()));
        }
        let a = &self.coeffs[2];
        let b = &self.coeffs[1];
        let c = &self.coeffs[0];
        Ok(b.mul_ref(b).sub_ref(&a.mul_ref(c).mul_int(4)))
    }
}

impl RatPoly {
    /// Integer-coefficient convenience constructor, ascending degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    /// `x - r` factors multiplied out, for building products like
    /// `(s+3)(s-6)(s-9)(s-10)`.
    pub fn from_roots(roots: &[Rational]) -> Self {
        let mut p = RatPoly::constant(<Rational as Ring>::one());
        for r in roots {
            let factor = Poly::new(vec![r.clone().neg_ref(), <Rational as Ring>::one()]);
            p = p.mul(&factor);
        }
        p
    }

    pub fn to_surd(&self) -> SurdPoly {
        self.map(|c| Surd::rational(c.clone()))
    }

    pub fn eval_surd(&self, x: &Surd) -> Surd {
        self.to_surd().eval(x)
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs_f64()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}
