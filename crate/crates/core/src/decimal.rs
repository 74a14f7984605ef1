//! Fixed-point decimal arithmetic at configurable precision.
//!
//! Square roots and logarithms of exact rationals cannot stay rational, so
//! the divergence closed forms that need them run here: a value is a big
//! integer mantissa scaled by `10^digits`, and a [`DecimalContext`] carries
//! the working precision. Every operation truncates toward zero, so results
//! are deterministic for a given context and input order; the precision is
//! part of the input contract.
//!
//! Logarithms use the atanh series after range reduction to `[1, 2)`:
//! `ln r = e ln 2 + 2 atanh((m-1)/(m+1))` with the series argument below
//! `1/3`, so each term gains roughly a decimal digit. Square roots are
//! floor integer square roots of the rescaled numerator.

use alloc::string::String;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A fixed-point decimal: `mantissa / 10^digits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decimal {
    mantissa: BigInt,
    digits: u32,
}

impl Decimal {
    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Decimal {
        Decimal { mantissa: self.mantissa.abs(), digits: self.digits }
    }

    /// Exact rational value of this fixed-point number.
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::from(10u32).pow(self.digits))
            .expect("positive power of ten")
    }
}

/// Working precision plus cached constants.
pub struct DecimalContext {
    digits: u32,
    scale: BigInt,
    ln2: BigInt,
}

impl DecimalContext {
    pub fn new(digits: u32) -> Self {
        let scale = BigInt::from(10u32).pow(digits);
        let mut ctx = DecimalContext { digits, scale, ln2: BigInt::zero() };
        let third = Rational::new(1, 3).expect("nonzero denominator");
        ctx.ln2 = ctx.atanh_series(&third).mantissa * 2;
        ctx
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn zero(&self) -> Decimal {
        Decimal { mantissa: BigInt::zero(), digits: self.digits }
    }

    pub fn one(&self) -> Decimal {
        Decimal { mantissa: self.scale.clone(), digits: self.digits }
    }

    /// Nearest fixed-point value toward zero.
    pub fn from_rational(&self, r: &Rational) -> Decimal {
        Decimal { mantissa: r.numer() * &self.scale / r.denom(), digits: self.digits }
    }

    pub fn add(&self, a: &Decimal, b: &Decimal) -> Decimal {
        Decimal { mantissa: &a.mantissa + &b.mantissa, digits: self.digits }
    }

    pub fn sub(&self, a: &Decimal, b: &Decimal) -> Decimal {
        Decimal { mantissa: &a.mantissa - &b.mantissa, digits: self.digits }
    }

    pub fn mul(&self, a: &Decimal, b: &Decimal) -> Decimal {
        Decimal { mantissa: &a.mantissa * &b.mantissa / &self.scale, digits: self.digits }
    }

    pub fn mul_integer(&self, a: &Decimal, k: &BigInt) -> Decimal {
        Decimal { mantissa: &a.mantissa * k, digits: self.digits }
    }

    pub fn div(&self, a: &Decimal, b: &Decimal) -> Result<Decimal> {
        if b.mantissa.is_zero() {
            return Err(Error::Domain("decimal division by zero".into()));
        }
        Ok(Decimal { mantissa: &a.mantissa * &self.scale / &b.mantissa, digits: self.digits })
    }

    /// `a^k` by binary exponentiation, truncating at every step.
    pub fn pow_u64(&self, a: &Decimal, mut k: u64) -> Decimal {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Floor square root of a non-negative rational at this precision.
    pub fn sqrt_rational(&self, r: &Rational) -> Result<Decimal> {
        if r.is_negative() {
            return Err(Error::Domain(alloc::format!("square root of negative value {r}")));
        }
        let scaled: BigUint =
            (r.numer().magnitude() * &self.scale.magnitude().pow(2)) / r.denom().magnitude();
        Ok(Decimal { mantissa: BigInt::from(scaled.sqrt()), digits: self.digits })
    }

    /// Natural logarithm of a positive rational at this precision.
    pub fn ln_rational(&self, r: &Rational) -> Result<Decimal> {
        if r.is_negative() || r.is_zero() {
            return Err(Error::Domain(alloc::format!("logarithm of non-positive value {r}")));
        }
        // reduce to r = m * 2^e with m in [1, 2)
        let mut e = r.numer().magnitude().bits() as i64 - r.denom().magnitude().bits() as i64;
        let m = shift_by(r, -e);
        let m = if m < Rational::one() {
            e -= 1;
            shift_by(r, -e)
        } else {
            m
        };
        debug_assert!(m >= Rational::one() && m < Rational::integer(2));

        let t = (&m - &Rational::one()) / (&m + &Rational::one());
        let series = self.atanh_series(&t);
        let ln_m = &series.mantissa * 2;

        let e_ln2 = &self.ln2 * e;
        Ok(Decimal { mantissa: ln_m + e_ln2, digits: self.digits })
    }

    /// `ln 2`, precomputed as `2 atanh(1/3)`.
    pub fn ln2(&self) -> Decimal {
        Decimal { mantissa: self.ln2.clone(), digits: self.digits }
    }

    /// `atanh(t) = t + t^3/3 + t^5/5 + ...` for `0 <= t < 1`; terminates
    /// once a term underflows the fixed-point grid.
    fn atanh_series(&self, t: &Rational) -> Decimal {
        let t_fixed = self.from_rational(t);
        let t_squared = self.mul(&t_fixed, &t_fixed);
        let mut power = t_fixed.clone();
        let mut sum = t_fixed.mantissa;
        let mut k = BigInt::from(3u32);
        loop {
            power = self.mul(&power, &t_squared);
            if power.mantissa.is_zero() {
                break;
            }
            sum += &power.mantissa / &k;
            k += 2;
        }
        Decimal { mantissa: sum, digits: self.digits }
    }

    /// Drops precision to `to` digits, truncating toward zero.
    pub fn truncate(&self, d: &Decimal, to: u32) -> Decimal {
        debug_assert!(to <= d.digits);
        Decimal {
            mantissa: &d.mantissa / BigInt::from(10u32).pow(d.digits - to),
            digits: to,
        }
    }

    /// Plain decimal string with exactly `d.digits` fractional places.
    pub fn to_plain_string(&self, d: &Decimal) -> String {
        decimal_string(d)
    }
}

/// Renders `mantissa / 10^digits` as a plain signed decimal string.
pub fn decimal_string(d: &Decimal) -> String {
    let sign = if d.mantissa.is_negative() { "-" } else { "" };
    let mag = d.mantissa.magnitude();
    let scale = BigUint::from(10u32).pow(d.digits);
    let int_part = mag / &scale;
    let frac_part = mag % &scale;
    if d.digits == 0 {
        return alloc::format!("{sign}{int_part}");
    }
    let frac = frac_part.to_str_radix(10);
    alloc::format!("{sign}{int_part}.{frac:0>width$}", width = d.digits as usize)
}

fn shift_by(r: &Rational, e: i64) -> Rational {
    // r * 2^e without going through floating point
    r * &Rational::pow2(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn ln2_reference_digits() {
        let ctx = DecimalContext::new(60);
        let got = ctx.to_plain_string(&ctx.ln2());
        assert!(got.starts_with("0.69314718055994530941723212145817656807550013436025"));
    }

    #[test]
    fn sqrt_reference_digits() {
        let ctx = DecimalContext::new(60);
        let got = ctx.to_plain_string(&ctx.sqrt_rational(&Rational::integer(2)).unwrap());
        assert!(got.starts_with("1.41421356237309504880168872420969807856967187537694"));

        let got = ctx.to_plain_string(&ctx.sqrt_rational(&r(3, 8)).unwrap());
        assert!(got.starts_with("0.61237243569579452454932101867647284799148687016416"));

        assert_eq!(ctx.sqrt_rational(&r(1, 4)).unwrap(), ctx.from_rational(&r(1, 2)));
        assert!(ctx.sqrt_rational(&r(-1, 4)).is_err());
    }

    #[test]
    fn ln_reference_digits() {
        let ctx = DecimalContext::new(60);
        let got = ctx.to_plain_string(&ctx.ln_rational(&Rational::integer(3)).unwrap());
        assert!(got.starts_with("1.09861228866810969139524523692252570464749055782274"));

        let got = ctx.to_plain_string(&ctx.ln_rational(&Rational::integer(10)).unwrap());
        assert!(got.starts_with("2.30258509299404568401799145468436420760110148862877"));

        let got = ctx.to_plain_string(&ctx.ln_rational(&r(5, 16)).unwrap());
        assert!(got.starts_with("-1.16315080980568086306816915260651863277639918317250"));

        assert_eq!(ctx.ln_rational(&Rational::one()).unwrap(), ctx.zero());
        assert!(ctx.ln_rational(&Rational::zero()).is_err());
        assert!(ctx.ln_rational(&r(-1, 2)).is_err());
    }

    #[test]
    fn ln_of_powers_of_two_is_multiple_of_ln2() {
        let ctx = DecimalContext::new(50);
        let ln2 = ctx.ln2();
        let ln1024 = ctx.ln_rational(&Rational::integer(1024)).unwrap();
        assert_eq!(ln1024.mantissa(), &(ln2.mantissa() * 10));
        let ln_half = ctx.ln_rational(&r(1, 2)).unwrap();
        assert_eq!(ln_half.mantissa(), &(-ln2.mantissa()));
    }

    #[test]
    fn arithmetic_and_pow() {
        let ctx = DecimalContext::new(20);
        let a = ctx.from_rational(&r(3, 2));
        let b = ctx.from_rational(&r(1, 4));
        assert_eq!(ctx.mul(&a, &b), ctx.from_rational(&r(3, 8)));
        assert_eq!(ctx.add(&a, &b), ctx.from_rational(&r(7, 4)));
        assert_eq!(ctx.sub(&a, &b), ctx.from_rational(&r(5, 4)));
        assert_eq!(ctx.div(&a, &b).unwrap(), ctx.from_rational(&Rational::integer(6)));
        assert_eq!(ctx.pow_u64(&b, 3), ctx.from_rational(&r(1, 64)));
        assert_eq!(ctx.pow_u64(&a, 0), ctx.one());
        assert!(ctx.div(&a, &ctx.zero()).is_err());
    }

    #[test]
    fn agrees_with_f64_at_machine_precision() {
        let ctx = DecimalContext::new(40);
        for (n, d) in [(1i64, 7i64), (22, 7), (355, 113), (99, 100), (1, 1000), (987, 11)] {
            let v = r(n, d);
            let ln_fixed: f64 = ctx.to_plain_string(&ctx.ln_rational(&v).unwrap()).parse().unwrap();
            let ln_float = (n as f64 / d as f64).ln();
            assert!((ln_fixed - ln_float).abs() < 1e-12, "ln({n}/{d}): {ln_fixed} vs {ln_float}");

            let sq_fixed: f64 = ctx.to_plain_string(&ctx.sqrt_rational(&v).unwrap()).parse().unwrap();
            let sq_float = (n as f64 / d as f64).sqrt();
            assert!((sq_fixed - sq_float).abs() < 1e-12, "sqrt({n}/{d})");
        }
    }

    #[test]
    fn rendering_pads_and_signs() {
        let ctx = DecimalContext::new(4);
        assert_eq!(ctx.to_plain_string(&ctx.from_rational(&r(1, 16))), "0.0625");
        assert_eq!(ctx.to_plain_string(&ctx.from_rational(&r(-1, 16))), "-0.0625");
        assert_eq!(ctx.to_plain_string(&ctx.from_rational(&Rational::integer(3))), "3.0000");
        let narrow = DecimalContext::new(0);
        assert_eq!(narrow.to_plain_string(&narrow.from_rational(&Rational::integer(3))), "3");
    }

    #[test]
    fn truncate_drops_digits() {
        let ctx = DecimalContext::new(10);
        let v = ctx.from_rational(&r(1, 3));
        let t = ctx.truncate(&v, 4);
        assert_eq!(decimal_string(&t), "0.3333");
    }
}
