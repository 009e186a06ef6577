//! Arbitrary-precision rational numbers.
//!
//! Backed by `num_rational::BigRational`, which maintains the invariants the
//! rest of the crate relies on: always reduced to lowest terms, denominator
//! strictly positive, canonical zero `0/1`.

use super::ExactError;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `p/q` as a [`Rational`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer `p` as a [`Rational`].
pub fn rat_i(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Lossless text form, `"p"` for integers and `"p/q"` otherwise.
pub fn rat_to_string(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn rational_from_str(s: &str) -> Result<Rational, ExactError> {
    let err = || ExactError::Parse(s.to_string());
    match s.split_once('/') {
        None => {
            let p: BigInt = s.trim().parse().map_err(|_| err())?;
            Ok(Rational::from_integer(p))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Exact division, rejecting a zero divisor instead of panicking.
pub fn checked_div(x: &Rational, y: &Rational) -> Result<Rational, ExactError> {
    if y.is_zero() {
        Err(ExactError::DivisionByZero)
    } else {
        Ok(x / y)
    }
}

/// Is `x` the square of a rational? `x` must be non-negative.
pub fn is_perfect_square(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let num = x.numer().to_biguint().expect("non-negative numerator");
    let den = x.denom().to_biguint().expect("positive denominator");
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &sn * &sn == num && &sd * &sd == den {
        Some(Rational::new(BigInt::from(sn), BigInt::from(sd)))
    } else {
        None
    }
}

/// Dyadic lower approximation of `sqrt(x)` with absolute error below
/// `2^-bits`, for `x >= 0`. Used as a high-precision float oracle in tests
/// and cross-checks; never on a certificate path.
pub fn dyadic_sqrt(x: &Rational, bits: u32) -> Result<Rational, ExactError> {
    if x.is_negative() {
        return Err(ExactError::NegativeRadicand(rat_to_string(x)));
    }
    // sqrt(p/q) = sqrt(p*q)/q; floor(sqrt(p*q*4^k))/2^k is within 2^-k of
    // sqrt(p*q), and dividing by q >= 1 only shrinks the error.
    let p = x.numer().to_biguint().expect("non-negative numerator");
    let q = x.denom().to_biguint().expect("positive denominator");
    let scaled = (&p * &q) << (2 * bits as usize);
    let root = scaled.sqrt();
    let denom = BigUint::from(1u8) << (bits as usize);
    Ok(Rational::new(
        BigInt::from(root),
        BigInt::from(denom * q),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fraction_addition_reduces() {
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
    }

    #[test]
    fn inverse_cancellation() {
        assert_eq!(rat(31439, 28800) * rat_i(28800), rat_i(31439));
    }

    #[test]
    fn nine_minus_eight_alpha() {
        // Long-hand: 9 - 31439/3600 = (32400 - 31439)/3600.
        let v = rat_i(9) - rat_i(8) * rat(31439, 28800);
        assert_eq!(v, rat(961, 3600));
        // (31/60)^2, which is why Appendix-style ladders stay rational here.
        assert_eq!(is_perfect_square(&v), Some(rat(31, 60)));
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert_eq!(
            checked_div(&rat_i(1), &rat_i(0)),
            Err(ExactError::DivisionByZero)
        );
    }

    #[test]
    fn parse_round_trip() {
        for s in ["31439/28800", "-7", "0", "105696"] {
            let x = rational_from_str(s).unwrap();
            assert_eq!(rat_to_string(&x), s);
        }
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("abc").is_err());
    }

    #[test]
    fn dyadic_sqrt_brackets_value() {
        let two = rat_i(2);
        let s = dyadic_sqrt(&two, 200).unwrap();
        assert!(&s * &s <= two);
        let step = Rational::new(1.into(), BigInt::from(2).pow(200u32));
        let s_up = &s + &step;
        assert!(&s_up * &s_up > two);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..100).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in (arb_rational(), arb_rational(), arb_rational())) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }

        #[test]
        fn always_lowest_terms((a, b) in (arb_rational(), arb_rational())) {
            let s = &a + &b;
            let g = num_integer::gcd(s.numer().clone(), s.denom().clone());
            prop_assert!(g.magnitude() == &num_bigint::BigUint::from(1u8));
            prop_assert!(s.denom() > &BigInt::from(0));
        }
    }
}
