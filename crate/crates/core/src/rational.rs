//! Arbitrary-precision rationals with the denominator accounting the
//! counting arguments need.
//!
//! [`Rational`] is the universal number type of this crate: Bernoulli
//! parameters, pmf values, the gadget offset beta and every TV value are
//! stored in it. Values are always in lowest terms with a positive
//! denominator, and all arithmetic is exact. The wire form is the string
//! `"a/b"` with `/b` omitted when the denominator is 1.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact rational number, kept in lowest terms with denominator > 0.
/// Zero is `0/1`; equality is structural equality of reduced forms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den`, reducing eagerly. Fails on a zero denominator.
    pub fn new<N, D>(num: N, den: D) -> Result<Self>
    where
        N: Into<BigInt>,
        D: Into<BigInt>,
    {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn integer<N: Into<BigInt>>(n: N) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn one_half() -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// `2^exp` for any integer exponent, including negative ones.
    pub fn pow2(exp: i64) -> Self {
        let mag = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            Rational(BigRational::from_integer(mag))
        } else {
            Rational(BigRational::new(BigInt::one(), mag))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator of the reduced form; always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// `1 - self`. For a reduced `a/b` in `[0,1]` the complement `(b-a)/b`
    /// is already reduced and shares the same denominator.
    pub fn complement(&self) -> Self {
        Rational(BigRational::one() - &self.0)
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    /// If `self = a/2^k` in lowest terms, returns the minimal such `k`;
    /// `None` when the denominator is not a power of two.
    pub fn dyadic_bits(&self) -> Option<u64> {
        let den = self.0.denom().magnitude();
        let tz = den.trailing_zeros()?;
        if (den >> tz).is_one() {
            Some(tz)
        } else {
            None
        }
    }

    /// Fixed-precision decimal rendering, truncated toward zero.
    /// Presentation only; never feeds back into computation.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let num = self.0.numer().magnitude();
        let den = self.0.denom().magnitude();
        let sign = if self.0.is_negative() { "-" } else { "" };
        let int_part = num / den;
        let mut rem = num % den;
        let mut frac = String::with_capacity(digits);
        for _ in 0..digits {
            rem *= 10u32;
            frac.push_str(&(&rem / den).to_string());
            rem %= den;
        }
        if digits == 0 {
            alloc::format!("{sign}{int_part}")
        } else {
            alloc::format!("{sign}{int_part}.{frac}")
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({self})")
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_int = |t: &str| -> Result<BigInt> {
            BigInt::from_str(t)
                .map_err(|_| Error::Domain(alloc::format!("malformed integer {t:?} in rational literal")))
        };
        match s.split_once('/') {
            None => Ok(Rational::integer(parse_int(s)?)),
            Some((n, d)) => Rational::new(parse_int(n)?, parse_int(d)?),
        }
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::integer(BigInt::from(n))
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $imp<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $imp<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl $imp<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// The normalizer `M` of the accepting-path argument: the product of the
/// reduced-form denominators of every value in the list *and* of every
/// complement `1 - value`, with multiplicity. Deliberately the literal
/// product rather than an lcm, so `M * v` and `M * (1 - v)` are integers
/// term by term.
pub fn common_denominator(values: &[Rational]) -> Result<BigUint> {
    if values.is_empty() {
        return Err(Error::Domain("common_denominator of an empty list".into()));
    }
    let mut m = BigUint::one();
    for v in values {
        if !v.in_unit_interval() {
            return Err(Error::Domain(alloc::format!(
                "value {v} outside [0,1] has no probability complement"
            )));
        }
        m *= v.denom().magnitude();
        m *= v.complement().denom().magnitude();
    }
    Ok(m)
}

/// Bit-length bookkeeping over a list of parameters: how many binary-fraction
/// bits a budget `m` must grant each parameter, and whether the whole list is
/// dyadic (every value of the form `a/2^k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitProfile {
    /// Number of tracked parameters.
    pub n: usize,
    /// Per-parameter bit budget: the max over parameters of the bit length
    /// needed (minimal dyadic exponent when dyadic, denominator bit length
    /// otherwise), at least 1.
    pub m: u64,
    /// True iff every tracked value is an `m`-bit binary fraction.
    pub dyadic: bool,
}

impl BitProfile {
    pub fn of_values(values: &[Rational]) -> BitProfile {
        let mut m = 1u64;
        let mut dyadic = true;
        for v in values {
            match v.dyadic_bits() {
                Some(k) => m = m.max(k),
                None => {
                    dyadic = false;
                    m = m.max(v.denom().magnitude().bits());
                }
            }
        }
        BitProfile { n: values.len(), m, dyadic }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn construction_reduces_eagerly() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(-3, -6), r(1, 2));
        assert_eq!(r(3, -6), r(-1, 2));
        assert_eq!(r(0, 7), Rational::zero());
        assert_eq!(r(0, 7).denom(), &BigInt::from(1));
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(matches!(Rational::new(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn dyadic_detection() {
        assert_eq!(r(3, 8).dyadic_bits(), Some(3));
        assert_eq!(r(2, 3).dyadic_bits(), None);
        assert_eq!(r(1, 1).dyadic_bits(), Some(0));
        assert_eq!(r(0, 1).dyadic_bits(), Some(0));
        assert_eq!(r(1, 1024).dyadic_bits(), Some(10));
        assert_eq!(r(6, 8).dyadic_bits(), Some(2)); // reduces to 3/4
    }

    #[test]
    fn common_denominator_counts_complements() {
        let m = common_denominator(&[r(1, 2), r(1, 3)]).unwrap();
        assert_eq!(m, BigUint::from(36u32)); // 2 * 2 * 3 * 3

        let m = common_denominator(&[Rational::zero(), Rational::one()]).unwrap();
        assert_eq!(m, BigUint::one());

        let m = common_denominator(&[r(1, 2)]).unwrap();
        assert_eq!(m, BigUint::from(4u32)); // 1/2 and 1 - 1/2 both contribute 2
    }

    #[test]
    fn common_denominator_rejects_out_of_range() {
        assert!(common_denominator(&[r(3, 2)]).is_err());
        assert!(common_denominator(&[r(-1, 2)]).is_err());
        assert!(common_denominator(&[]).is_err());
    }

    #[test]
    fn display_and_parse_round_trip() {
        assert_eq!(r(5, 16).to_string(), "5/16");
        assert_eq!(r(7, 1).to_string(), "7");
        assert_eq!(r(-1, 3).to_string(), "-1/3");
        assert_eq!("5/16".parse::<Rational>().unwrap(), r(5, 16));
        assert_eq!("7".parse::<Rational>().unwrap(), r(7, 1));
        assert_eq!("-6/8".parse::<Rational>().unwrap(), r(-3, 4));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn decimal_rendering_truncates() {
        assert_eq!(r(5, 16).to_decimal_string(4), "0.3125");
        assert_eq!(r(1, 3).to_decimal_string(5), "0.33333");
        assert_eq!(r(-1, 3).to_decimal_string(3), "-0.333");
        assert_eq!(r(7, 2).to_decimal_string(0), "3");
    }

    #[test]
    fn pow2_handles_both_signs() {
        assert_eq!(Rational::pow2(0), Rational::one());
        assert_eq!(Rational::pow2(5), Rational::integer(32));
        assert_eq!(Rational::pow2(-3), r(1, 8));
    }

    #[test]
    fn bit_profile_examples() {
        let p = BitProfile::of_values(&[r(3, 8), r(1, 2)]);
        assert_eq!((p.n, p.m, p.dyadic), (2, 3, true));

        let p = BitProfile::of_values(&[r(2, 3), r(1, 2)]);
        assert!(!p.dyadic);
        assert_eq!(p.m, 2); // denominator 3 needs two bits

        let p = BitProfile::of_values(&[Rational::zero(), Rational::one()]);
        assert_eq!((p.m, p.dyadic), (1, true)); // budget is at least 1
    }

    proptest! {
        #[test]
        fn arithmetic_is_exact(an in -200i64..200, ad in 1i64..60, bn in -200i64..200, bd in 1i64..60) {
            let a = r(an, ad);
            let b = r(bn, bd);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&a + &b, &b + &a);
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a);
            }
        }

        #[test]
        fn dyadic_recognizes_all_binary_fractions(a in 0u64..=256, k in 0u32..12) {
            let v = Rational::new(a, 1u64 << k).unwrap();
            // minimal exponent after reduction, so only an upper bound here
            let bits = v.dyadic_bits();
            prop_assert!(bits.is_some());
            prop_assert!(bits.unwrap() <= u64::from(k));
            // and the reduced form still reconstructs the value
            prop_assert_eq!(&v * &Rational::pow2(i64::from(k)), Rational::integer(a));
        }

        #[test]
        fn normalizer_clears_values_and_complements(nums in proptest::collection::vec((0i64..=60, 1i64..=60), 1..6)) {
            let vals: alloc::vec::Vec<Rational> = nums
                .into_iter()
                .map(|(a, b)| { let b = b.max(a); r(a, b) })
                .collect();
            let m = common_denominator(&vals).unwrap();
            let m = Rational::integer(BigInt::from(m));
            for v in &vals {
                prop_assert!((&m * v).is_integer());
                prop_assert!((&m * &v.complement()).is_integer());
            }
        }

        #[test]
        fn string_round_trip(n in -1000i64..1000, d in 1i64..1000) {
            let v = r(n, d);
            prop_assert_eq!(v.to_string().parse::<Rational>().unwrap(), v);
        }
    }
}
