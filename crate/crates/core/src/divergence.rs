//! Divergences that tensorize over the marginals: Kullback-Leibler,
//! chi-square and squared Hellinger. Each closed form is linear in the
//! number of coordinates, in sharp contrast with exact TV distance, whose
//! enumeration is capped. Every closed form has a brute-force counterpart
//! that sums over the full `2^n` domain, kept as an independent check of
//! the tensorization identities.
//!
//! Chi-square is rational-closed and stays exact. KL and Hellinger need
//! logs and square roots, so they evaluate in fixed-point decimal at a
//! caller-chosen precision (see [`crate::decimal`]); results carry that
//! precision and never feed back into exact computations.
//!
//! Closed forms evaluate one term per *distinct* marginal pair and combine
//! by counts, so widths in the millions are cheap when parameters repeat.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;

use crate::decimal::{Decimal, DecimalContext};
use crate::error::{Error, Result};
use crate::product::{Cap, ProductDistribution};
use crate::rational::Rational;

/// Extra working digits beyond the requested precision; truncation noise
/// stays well below the returned grid.
const GUARD_DIGITS: u32 = 10;

/// Default output precision: 50 decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Kl,
    Chi2,
    Hellinger2,
}

/// Logarithm base for KL output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Nats,
    Bits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivergenceNumber {
    /// Rational-closed measures (chi-square) keep the exact value.
    Exact(Rational),
    /// Transcendental measures carry a fixed-point decimal.
    Decimal(Decimal),
}

/// Result of a divergence computation. `value` is `None` exactly when the
/// divergence is infinite (an absolute-continuity violation for KL or
/// chi-square); infinity is a flagged outcome, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceValue {
    pub measure: Measure,
    pub value: Option<DivergenceNumber>,
}

impl DivergenceValue {
    pub fn finite(&self) -> bool {
        self.value.is_some()
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match &self.value {
            Some(DivergenceNumber::Exact(r)) => Some(r),
            _ => None,
        }
    }

    pub fn as_decimal(&self) -> Option<&Decimal> {
        match &self.value {
            Some(DivergenceNumber::Decimal(d)) => Some(d),
            _ => None,
        }
    }
}

fn check_dims(p: &ProductDistribution, q: &ProductDistribution) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch { left: p.n(), right: q.n() });
    }
    Ok(())
}

/// Marginal pair keyed by structural (reduced-form) comparison: plain
/// bigint compares instead of the cross-multiplying value order, which is
/// what keeps grouping cheap at millions of coordinates.
#[derive(PartialEq, Eq)]
struct PairKey<'a>(&'a Rational, &'a Rational);

impl Ord for PairKey<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.numer(), self.0.denom(), self.1.numer(), self.1.denom()).cmp(&(
            other.0.numer(),
            other.0.denom(),
            other.1.numer(),
            other.1.denom(),
        ))
    }
}

impl PartialOrd for PairKey<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn grouped_pairs<'a>(
    p: &'a ProductDistribution,
    q: &'a ProductDistribution,
) -> Vec<((&'a Rational, &'a Rational), u64)> {
    let mut map: BTreeMap<PairKey<'a>, u64> = BTreeMap::new();
    for pair in p.params().iter().zip(q.params().iter()) {
        *map.entry(PairKey(pair.0, pair.1)).or_insert(0) += 1;
    }
    map.into_iter().map(|(PairKey(a, b), count)| ((a, b), count)).collect()
}

/// `sum_i p_i log(p_i/q_i) + (1-p_i) log((1-p_i)/(1-q_i))`, with the
/// convention `0 log(0/x) = 0`; infinite when some `p_i > 0 = q_i` or
/// `1 - p_i > 0 = 1 - q_i`.
pub fn kl_product(
    p: &ProductDistribution,
    q: &ProductDistribution,
    digits: u32,
    base: LogBase,
) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    for (pi, qi) in p.params().iter().zip(q.params()) {
        if kl_marginal_infinite(pi, qi) {
            return Ok(DivergenceValue { measure: Measure::Kl, value: None });
        }
    }
    let ctx = DecimalContext::new(digits + GUARD_DIGITS);
    let mut sum = ctx.zero();
    for ((pi, qi), count) in grouped_pairs(p, q) {
        let term = kl_marginal(&ctx, pi, qi)?;
        sum = ctx.add(&sum, &ctx.mul_integer(&term, &BigInt::from(count)));
    }
    if let LogBase::Bits = base {
        sum = ctx.div(&sum, &ctx.ln2())?;
    }
    Ok(finish_decimal(Measure::Kl, &ctx, sum, digits))
}

fn kl_marginal_infinite(p: &Rational, q: &Rational) -> bool {
    (q.is_zero() && !p.is_zero()) || (q.is_one() && !p.is_one())
}

fn kl_marginal(ctx: &DecimalContext, p: &Rational, q: &Rational) -> Result<Decimal> {
    let mut term = ctx.zero();
    if !p.is_zero() {
        let log_ratio = ctx.ln_rational(&(p / q))?;
        term = ctx.add(&term, &ctx.mul(&ctx.from_rational(p), &log_ratio));
    }
    let pc = p.complement();
    if !pc.is_zero() {
        let log_ratio = ctx.ln_rational(&(&pc / &q.complement()))?;
        term = ctx.add(&term, &ctx.mul(&ctx.from_rational(&pc), &log_ratio));
    }
    Ok(term)
}

/// `prod_i (1 + (p_i - q_i)^2 / (q_i (1 - q_i))) - 1`, exact. A coordinate
/// with degenerate `q_i` contributes factor 1 when `p_i = q_i` and makes
/// the divergence infinite otherwise.
pub fn chi2_product(p: &ProductDistribution, q: &ProductDistribution) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let mut product = Rational::one();
    for (pi, qi) in p.params().iter().zip(q.params()) {
        match chi2_marginal_factor(pi, qi) {
            Some(factor) => product = product * factor,
            None => return Ok(DivergenceValue { measure: Measure::Chi2, value: None }),
        }
    }
    Ok(DivergenceValue {
        measure: Measure::Chi2,
        value: Some(DivergenceNumber::Exact(product - Rational::one())),
    })
}

/// Fixed-precision variant of [`chi2_product`] for wide instances, where
/// the exact product's representation grows with every coordinate.
pub fn chi2_product_decimal(
    p: &ProductDistribution,
    q: &ProductDistribution,
    digits: u32,
) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let ctx = DecimalContext::new(digits + GUARD_DIGITS);
    let mut product = ctx.one();
    for ((pi, qi), count) in grouped_pairs(p, q) {
        match chi2_marginal_factor(pi, qi) {
            Some(factor) => {
                let factor = ctx.from_rational(&factor);
                product = ctx.mul(&product, &ctx.pow_u64(&factor, count));
            }
            None => return Ok(DivergenceValue { measure: Measure::Chi2, value: None }),
        }
    }
    let value = ctx.sub(&product, &ctx.one());
    Ok(finish_decimal(Measure::Chi2, &ctx, value, digits))
}

fn chi2_marginal_factor(p: &Rational, q: &Rational) -> Option<Rational> {
    if q.is_zero() || q.is_one() {
        if p == q {
            Some(Rational::one())
        } else {
            None
        }
    } else {
        let diff = p - q;
        Some(Rational::one() + &diff * &diff / (q * &q.complement()))
    }
}

/// `1 - prod_i (sqrt(p_i q_i) + sqrt((1-p_i)(1-q_i)))` in fixed-point
/// decimal. Always finite and within `[0, 1]`.
pub fn hellinger2_product(
    p: &ProductDistribution,
    q: &ProductDistribution,
    digits: u32,
) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let ctx = DecimalContext::new(digits + GUARD_DIGITS);
    let mut product = ctx.one();
    for ((pi, qi), count) in grouped_pairs(p, q) {
        let factor = hellinger_marginal_factor(&ctx, pi, qi)?;
        product = ctx.mul(&product, &ctx.pow_u64(&factor, count));
    }
    let value = ctx.sub(&ctx.one(), &product);
    Ok(finish_decimal(Measure::Hellinger2, &ctx, value, digits))
}

fn hellinger_marginal_factor(
    ctx: &DecimalContext,
    p: &Rational,
    q: &Rational,
) -> Result<Decimal> {
    let ones = ctx.sqrt_rational(&(p * q))?;
    let zeros = ctx.sqrt_rational(&(&p.complement() * &q.complement()))?;
    Ok(ctx.add(&ones, &zeros))
}

/// Brute-force KL: `sum_x P(x) log(P(x)/Q(x))` over the support of `P`.
pub fn kl_brute(
    p: &ProductDistribution,
    q: &ProductDistribution,
    digits: u32,
    base: LogBase,
    cap: Cap,
) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let tp = p.pmf_table(cap)?;
    let tq = q.pmf_table(cap)?;
    let ctx = DecimalContext::new(digits + GUARD_DIGITS);
    let mut sum = ctx.zero();
    for (px, qx) in tp.iter().zip(&tq) {
        if px.is_zero() {
            continue;
        }
        if qx.is_zero() {
            return Ok(DivergenceValue { measure: Measure::Kl, value: None });
        }
        let term = ctx.mul(&ctx.from_rational(px), &ctx.ln_rational(&(px / qx))?);
        sum = ctx.add(&sum, &term);
    }
    if let LogBase::Bits = base {
        sum = ctx.div(&sum, &ctx.ln2())?;
    }
    Ok(finish_decimal(Measure::Kl, &ctx, sum, digits))
}

/// Brute-force chi-square: `sum_{x: Q(x) > 0} (P(x) - Q(x))^2 / Q(x)`,
/// exact; infinite when `P` puts mass outside `Q`'s support.
pub fn chi2_brute(
    p: &ProductDistribution,
    q: &ProductDistribution,
    cap: Cap,
) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let tp = p.pmf_table(cap)?;
    let tq = q.pmf_table(cap)?;
    let mut sum = Rational::zero();
    for (px, qx) in tp.iter().zip(&tq) {
        if qx.is_zero() {
            if !px.is_zero() {
                return Ok(DivergenceValue { measure: Measure::Chi2, value: None });
            }
            continue;
        }
        let diff = px - qx;
        sum = sum + &diff * &diff / qx;
    }
    Ok(DivergenceValue { measure: Measure::Chi2, value: Some(DivergenceNumber::Exact(sum)) })
}

/// Brute-force squared Hellinger: `1 - sum_x sqrt(P(x) Q(x))`.
pub fn hellinger2_brute(
    p: &ProductDistribution,
    q: &ProductDistribution,
    digits: u32,
    cap: Cap,
) -> Result<DivergenceValue> {
    check_dims(p, q)?;
    let tp = p.pmf_table(cap)?;
    let tq = q.pmf_table(cap)?;
    let ctx = DecimalContext::new(digits + GUARD_DIGITS);
    let mut coeff = ctx.zero();
    for (px, qx) in tp.iter().zip(&tq) {
        coeff = ctx.add(&coeff, &ctx.sqrt_rational(&(px * qx))?);
    }
    let value = ctx.sub(&ctx.one(), &coeff);
    Ok(finish_decimal(Measure::Hellinger2, &ctx, value, digits))
}

/// Truncates a guard-precision accumulator to the requested digits,
/// clamping truncation-noise negatives of provably non-negative values.
fn finish_decimal(
    measure: Measure,
    ctx: &DecimalContext,
    value: Decimal,
    digits: u32,
) -> DivergenceValue {
    let mut out = ctx.truncate(&value, digits);
    if out.is_negative() {
        // all three measures are non-negative; a sub-guard negative can
        // only be accumulated truncation error on a value of zero
        debug_assert!(out.abs().mantissa() < &BigInt::from(10u64).pow(GUARD_DIGITS));
        out = ctx.truncate(&ctx.zero(), digits);
    }
    DivergenceValue { measure, value: Some(DivergenceNumber::Decimal(out)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decimal::decimal_string;
    use crate::tv::tv_half_abs;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn dist(params: &[(i64, i64)]) -> ProductDistribution {
        ProductDistribution::new(params.iter().map(|&(n, d)| r(n, d)).collect()).unwrap()
    }

    const CAP: Cap = Cap::DEFAULT;

    fn dec_str(v: &DivergenceValue) -> String {
        decimal_string(v.as_decimal().unwrap())
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[(1, 2), (1, 3)]);
        let same = kl_product(&p, &p, 50, LogBase::Nats).unwrap();
        assert_eq!(dec_str(&same), format!("0.{}", "0".repeat(50)));

        let point = dist(&[(1, 1)]);
        let fair = dist(&[(1, 2)]);
        let nats = kl_product(&point, &fair, 50, LogBase::Nats).unwrap();
        assert!(dec_str(&nats).starts_with("0.693147180559945309417232121458176568075500134360"));
        let bits = kl_product(&point, &fair, 50, LogBase::Bits).unwrap();
        assert_eq!(dec_str(&bits), format!("1.{}", "0".repeat(50)));
    }

    #[test]
    fn kl_infinite_flags() {
        let p = dist(&[(1, 2)]);
        let q = dist(&[(0, 1)]);
        assert!(!kl_product(&p, &q, 50, LogBase::Nats).unwrap().finite());
        assert!(!kl_brute(&p, &q, 50, LogBase::Nats, CAP).unwrap().finite());

        // 1 - p > 0 = 1 - q
        let q = dist(&[(1, 1)]);
        assert!(!kl_product(&p, &q, 50, LogBase::Nats).unwrap().finite());

        // reverse direction is fine: P(x) = 0 terms vanish
        let p0 = dist(&[(0, 1)]);
        let qh = dist(&[(1, 2)]);
        assert!(kl_product(&p0, &qh, 50, LogBase::Nats).unwrap().finite());
    }

    #[test]
    fn chi2_examples() {
        let p = dist(&[(1, 2)]);
        assert_eq!(chi2_product(&p, &p).unwrap().as_exact().unwrap(), &Rational::zero());

        let q = dist(&[(1, 4)]);
        assert_eq!(chi2_product(&p, &q).unwrap().as_exact().unwrap(), &r(1, 3));
        assert_eq!(chi2_brute(&p, &q, CAP).unwrap().as_exact().unwrap(), &r(1, 3));

        // degenerate but equal coordinates contribute factor 1
        let a = dist(&[(1, 1), (1, 2)]);
        assert_eq!(chi2_product(&a, &a).unwrap().as_exact().unwrap(), &Rational::zero());

        // absolute-continuity violation
        let b = dist(&[(1, 2), (1, 2)]);
        assert!(!chi2_product(&b, &a).unwrap().finite());
        assert!(!chi2_brute(&b, &a, CAP).unwrap().finite());
    }

    #[test]
    fn hellinger_examples() {
        let p = dist(&[(1, 2), (2, 3)]);
        let same = hellinger2_product(&p, &p, 50).unwrap();
        assert_eq!(dec_str(&same), format!("0.{}", "0".repeat(50)));

        let one = dist(&[(1, 1)]);
        let zero = dist(&[(0, 1)]);
        let disjoint = hellinger2_product(&one, &zero, 50).unwrap();
        assert_eq!(dec_str(&disjoint), format!("1.{}", "0".repeat(50)));

        let a = dist(&[(1, 2)]);
        let b = dist(&[(1, 4)]);
        let h2 = hellinger2_product(&a, &b, 50).unwrap();
        assert!(dec_str(&h2).starts_with("0.034074173710931713250256800271102632366095160991"));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let p = dist(&[(1, 2)]);
        let q = dist(&[(1, 2), (1, 2)]);
        assert!(kl_product(&p, &q, 50, LogBase::Nats).is_err());
        assert!(chi2_product(&p, &q).is_err());
        assert!(hellinger2_product(&p, &q, 50).is_err());
    }

    fn arb_param() -> impl Strategy<Value = Rational> {
        (0i64..=12, 1i64..=12).prop_map(|(a, b)| {
            let b = b.max(a);
            r(a, b)
        })
    }

    fn arb_pair() -> impl Strategy<Value = (ProductDistribution, ProductDistribution)> {
        (1usize..6)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(arb_param(), n),
                    proptest::collection::vec(arb_param(), n),
                )
            })
            .prop_map(|(ps, qs)| {
                (ProductDistribution::new(ps).unwrap(), ProductDistribution::new(qs).unwrap())
            })
    }

    /// |a - b| in ulps of the shared fixed-point grid.
    fn ulp_distance(a: &Decimal, b: &Decimal) -> BigInt {
        (a.mantissa() - b.mantissa()).abs()
    }

    proptest! {
        #[test]
        fn chi2_tensorization_is_exact((p, q) in arb_pair()) {
            let closed = chi2_product(&p, &q).unwrap();
            let brute = chi2_brute(&p, &q, CAP).unwrap();
            prop_assert_eq!(closed, brute);
        }

        #[test]
        fn kl_tensorization_within_grid((p, q) in arb_pair()) {
            let closed = kl_product(&p, &q, 50, LogBase::Nats).unwrap();
            let brute = kl_brute(&p, &q, 50, LogBase::Nats, CAP).unwrap();
            prop_assert_eq!(closed.finite(), brute.finite());
            if let (Some(c), Some(b)) = (closed.as_decimal(), brute.as_decimal()) {
                // both sides carry 50 digits; agreement far below 1e-12
                prop_assert!(ulp_distance(c, b) < BigInt::from(10u64).pow(50 - 14));
            }
        }

        #[test]
        fn hellinger_tensorization_within_grid((p, q) in arb_pair()) {
            let closed = hellinger2_product(&p, &q, 50).unwrap();
            let brute = hellinger2_brute(&p, &q, 50, CAP).unwrap();
            let (c, b) = (closed.as_decimal().unwrap(), brute.as_decimal().unwrap());
            prop_assert!(ulp_distance(c, b) < BigInt::from(10u64).pow(50 - 14));
        }

        #[test]
        fn chi2_decimal_tracks_exact((p, q) in arb_pair()) {
            let exact = chi2_product(&p, &q).unwrap();
            let fixed = chi2_product_decimal(&p, &q, 40).unwrap();
            prop_assert_eq!(exact.finite(), fixed.finite());
            if let (Some(e), Some(f)) = (exact.as_exact(), fixed.as_decimal()) {
                let ctx = DecimalContext::new(40);
                prop_assert!(ulp_distance(&ctx.from_rational(e), f) < BigInt::from(1000u32));
            }
        }

        #[test]
        fn hellinger_tv_sandwich((p, q) in arb_pair()) {
            // H^2 <= TV <= sqrt(2 H^2), compared on the decimal grid with
            // slack for the truncated Hellinger evaluation
            let digits = 40u32;
            let ctx = DecimalContext::new(digits);
            let h2 = ctx.from_rational(
                &hellinger2_product(&p, &q, digits).unwrap().as_decimal().unwrap().to_rational(),
            );
            let tv = ctx.from_rational(&tv_half_abs(&p, &q, CAP).unwrap());
            let slack = BigInt::from(10u64).pow(10);
            prop_assert!(h2.mantissa() - tv.mantissa() <= slack.clone());
            // tv^2 <= 2 h2
            let tv2 = ctx.mul(&tv, &tv);
            let bound = ctx.mul_integer(&h2, &BigInt::from(2));
            prop_assert!(tv2.mantissa() - bound.mantissa() <= slack);
        }
    }
}
