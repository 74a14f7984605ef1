//! The constructive reduction chain that makes exact TV distance a
//! counting-hard problem, run forward as executable code:
//!
//! 1. `#SubsetProd -> #PMFEquals`: map items `a_i` to Bernoulli parameters
//!    `p_i = a_i / (1 + a_i)` and the target `T` to the pmf value
//!    `v = T * prod_i (1 - p_i)`. Subsets multiplying to `T` correspond
//!    one-to-one to outcomes with `P(x) = v`, so the solution counts agree.
//! 2. `#PMFEquals -> two TV queries`: build a hatted pair over `n + 1`
//!    coordinates whose TV distance collects `sum_{P(x) > v} (P(x) - v)`,
//!    then a primed pair over `n + 2` coordinates that appends the biased
//!    coin pair `(1/2 + beta, 1/2 - beta)`. The bias is chosen small enough
//!    that it cannot reorder any strict comparison between `P(x)` and `v`,
//!    so the primed TV exceeds the hatted TV by exactly one measurable
//!    quantum per solution. Dividing the gap by that quantum — the
//!    recovery coefficient — returns the exact solution count.
//!
//! Two case constructions keep every gadget parameter inside `[0,1]`:
//! Case A for `v < 2^-n` (quantum `2 beta v`, coefficient `1/(2 beta v)`)
//! and Case B for `v >= 2^-n` (quantum `2 beta / 2^n`, coefficient
//! `2^(n-1) / beta`).
//!
//! Recovered counts are validated hard: a non-integral or out-of-range
//! count means the construction or a TV computation is broken, and the
//! error says so rather than rounding.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::product::{Cap, ProductDistribution};
use crate::rational::{BitProfile, Rational};
use crate::tv::tv_positive_part;

/// Items `a_1..a_n` and target `T` of a subset-product counting instance.
/// Items and target must be positive; the parameter map sends `a_i` to
/// `a_i/(1+a_i)`, and zero items would only contribute degenerate
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetProdInstance {
    a: Vec<BigUint>,
    t: BigUint,
}

impl SubsetProdInstance {
    pub fn new(a: Vec<BigUint>, t: BigUint) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Domain("a subset-product instance needs n >= 1 items".into()));
        }
        if a.iter().any(BigUint::is_zero) {
            return Err(Error::Domain("all items a_i must be >= 1".into()));
        }
        if t.is_zero() {
            return Err(Error::Domain("the target T must be >= 1".into()));
        }
        Ok(SubsetProdInstance { a, t })
    }

    pub fn from_u64(a: &[u64], t: u64) -> Result<Self> {
        Self::new(a.iter().map(|&x| BigUint::from(x)).collect(), BigUint::from(t))
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn items(&self) -> &[BigUint] {
        &self.a
    }

    pub fn target(&self) -> &BigUint {
        &self.t
    }
}

/// A probability vector and a pmf value `v` to count preimages of.
///
/// `v` is allowed past 1 so that the subset-product reduction stays total
/// (an overshooting target yields `v > 1` and a trivially zero count); the
/// gadget constructions themselves insist on `0 < v <= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmfEqualsInstance {
    p: Vec<Rational>,
    v: Rational,
}

impl PmfEqualsInstance {
    pub fn new(p: Vec<Rational>, v: Rational) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Domain("a pmf-equals instance needs n >= 1 parameters".into()));
        }
        for (i, pi) in p.iter().enumerate() {
            if !pi.in_unit_interval() {
                return Err(Error::Domain(alloc::format!(
                    "parameter {} = {pi} is outside [0,1]",
                    i + 1
                )));
            }
        }
        if v.is_negative() {
            return Err(Error::Domain(alloc::format!("target value v = {v} is negative")));
        }
        Ok(PmfEqualsInstance { p, v })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn params(&self) -> &[Rational] {
        &self.p
    }

    pub fn value(&self) -> &Rational {
        &self.v
    }

    pub fn distribution(&self) -> ProductDistribution {
        ProductDistribution::new(self.p.clone()).expect("parameters validated on construction")
    }
}

/// Which gadget construction applies: `A` iff `v < 2^-n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    A,
    B,
}

/// Everything the hardness direction constructs for one instance: the two
/// distribution pairs, the bias, and the coefficient that converts the TV
/// gap back into a count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionArtifacts {
    pub case_tag: CaseTag,
    pub beta: Rational,
    /// Over `n + 1` coordinates.
    pub hat_p: ProductDistribution,
    pub hat_q: ProductDistribution,
    /// Over `n + 2` coordinates: the hatted pair extended by the biased coin.
    pub prime_p: ProductDistribution,
    pub prime_q: ProductDistribution,
    /// `1/(2 beta v)` in Case A, `2^(n-1)/beta` in Case B.
    pub recovery_coefficient: Rational,
    source_n: usize,
}

impl ReductionArtifacts {
    /// Width of the original instance (the gadgets carry `n+1` and `n+2`).
    pub fn source_n(&self) -> usize {
        self.source_n
    }
}

/// Lemma-style instance map: `p_i = a_i/(1+a_i)`, `v = T prod_i (1-p_i)`.
/// The output has exactly as many solutions as the input.
pub fn subsetprod_to_pmfequals(instance: &SubsetProdInstance) -> PmfEqualsInstance {
    let params: Vec<Rational> = instance
        .items()
        .iter()
        .map(|a| {
            let a = BigInt::from(a.clone());
            Rational::new(a.clone(), a + BigInt::one()).expect("denominator 1 + a_i >= 2")
        })
        .collect();
    let complement_mass = params
        .iter()
        .fold(Rational::one(), |acc, p| acc * p.complement());
    let v = Rational::integer(BigInt::from(instance.target().clone())) * complement_mass;
    PmfEqualsInstance { p: params, v }
}

/// Picks the bias for the separation property: no outcome may have its
/// strict comparison against `v` flipped by the `(1/2 +- beta)` factors,
/// which needs `beta < |v - P(x)| / (2 (v + P(x)))` whenever `P(x) != v`.
///
/// For instances whose parameters and `v` are binary fractions this is the
/// budget-based `beta = 2^(-3 n m)`, with `m` the per-parameter bit budget
/// (stretched so `v` fits in `n m` bits). General rationals have no bit
/// budget, but `v - P(x)` is a multiple of `1/D` for `D` the product of
/// all denominators, so `beta = 1/(4 D)` clears every gap.
pub fn compute_beta(instance: &PmfEqualsInstance) -> Result<Rational> {
    let v = instance.value();
    if v.is_zero() {
        return Err(Error::Domain(
            "beta is undefined for v = 0; counting P(x) = 0 has a closed form".into(),
        ));
    }
    let profile = BitProfile::of_values(instance.params());
    if profile.dyadic {
        if let Some(v_bits) = v.dyadic_bits() {
            let n = profile.n as u64;
            let m = profile.m.max(v_bits.div_ceil(n)).max(1);
            let exponent = 3u64 * n * m;
            return Ok(Rational::pow2(-i64::try_from(exponent).map_err(|_| {
                Error::Domain(alloc::format!("bit budget overflow: 3nm = 3*{n}*{m}"))
            })?));
        }
    }
    let mut denom_product = BigInt::from(v.denom().magnitude().clone());
    for p in instance.params() {
        denom_product *= p.denom();
    }
    Rational::new(BigInt::one(), denom_product * 4)
}

/// Exhaustively verifies the separation property of a candidate bias: over
/// every outcome, strict comparisons between `P(x)` and `v` survive the
/// `(1/2 + beta)` / `(1/2 - beta)` weighting in both directions, as do
/// their non-strict counterparts. Also insists on `0 < beta < 1/2`, since
/// the gadget coin `1/2 - beta` must stay inside `(0, 1/2)`.
pub fn check_beta_separation(
    instance: &PmfEqualsInstance,
    beta: &Rational,
    cap: Cap,
) -> Result<bool> {
    if beta.is_negative() || beta.is_zero() || beta >= &Rational::one_half() {
        return Ok(false);
    }
    let half_plus = Rational::one_half() + beta;
    let half_minus = Rational::one_half() - beta;
    let v = instance.value();
    let v_up = v * &half_plus;
    let v_down = v * &half_minus;
    let table = instance.distribution().pmf_table(cap)?;
    for mass in &table {
        let weighted_up = mass * &half_plus;
        let weighted_down = mass * &half_minus;
        let ok = match mass.cmp(v) {
            core::cmp::Ordering::Less => weighted_up < v_down && weighted_down <= v_up,
            core::cmp::Ordering::Equal => weighted_up >= v_down && weighted_down <= v_up,
            core::cmp::Ordering::Greater => weighted_down > v_up && weighted_up >= v_down,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the case-appropriate gadget pairs for an instance with
/// `0 < v <= 1`.
pub fn build_gadgets(instance: &PmfEqualsInstance) -> Result<ReductionArtifacts> {
    let v = instance.value();
    if v.is_zero() {
        return Err(Error::Domain(
            "v = 0 has no gadget; count it by the closed form over deterministic coordinates"
                .into(),
        ));
    }
    if v > &Rational::one() {
        return Err(Error::Domain(alloc::format!(
            "target value v = {v} exceeds 1; no outcome can attain it"
        )));
    }
    let n = instance.n();
    let beta = compute_beta(instance)?;
    let v_scaled = v * &Rational::pow2(n as i64); // v * 2^n

    let (case_tag, hat_p, hat_q, recovery_coefficient) = if v_scaled < Rational::one() {
        // Case A: v < 2^-n
        let hat_p = instance.distribution().extend(Rational::one())?;
        let hat_q = ProductDistribution::uniform(n)?.extend(v_scaled)?;
        let coefficient = Rational::one() / (Rational::integer(2) * &beta * v);
        (CaseTag::A, hat_p, hat_q, coefficient)
    } else {
        // Case B: v >= 2^-n
        let hat_p = instance.distribution().extend(Rational::one() / v_scaled)?;
        let hat_q = ProductDistribution::uniform(n)?.extend(Rational::one())?;
        let coefficient = Rational::pow2(n as i64 - 1) / &beta;
        (CaseTag::B, hat_p, hat_q, coefficient)
    };

    let prime_p = hat_p.extend(Rational::one_half() + &beta)?;
    let prime_q = hat_q.extend(Rational::one_half() - &beta)?;

    Ok(ReductionArtifacts {
        case_tag,
        beta,
        hat_p,
        hat_q,
        prime_p,
        prime_q,
        recovery_coefficient,
        source_n: n,
    })
}

/// Converts the two measured TV distances into the solution count:
/// `coefficient * (tv_prime - tv_hat)`. The result must come out as an
/// integer in `[0, 2^n]`; anything else is an invariant violation.
pub fn recover_count(
    artifacts: &ReductionArtifacts,
    tv_prime: &Rational,
    tv_hat: &Rational,
) -> Result<u64> {
    let count = &artifacts.recovery_coefficient * &(tv_prime - tv_hat);
    if count.is_negative() {
        return Err(Error::Invariant(alloc::format!(
            "recovered count {count} is negative (tv_prime < tv_hat)"
        )));
    }
    if !count.is_integer() {
        return Err(Error::Invariant(alloc::format!(
            "recovered count {count} is not an integer"
        )));
    }
    let numer = count.numer().magnitude();
    if numer.bits() > 63 || numer > &(BigUint::one() << artifacts.source_n) {
        return Err(Error::Invariant(alloc::format!(
            "recovered count {count} exceeds the domain size 2^{}",
            artifacts.source_n
        )));
    }
    let digits = numer.to_u64_digits();
    Ok(digits.first().copied().unwrap_or(0))
}

/// Full hardness chain for one instance: build the gadgets, take two TV
/// distances, recover the count.
///
/// `v = 0` bypasses the gadget (its recovery coefficient would divide by
/// `v`): `P(x) = 0` iff `x` hits some deterministic coordinate on its
/// zero-probability side, so the count is `2^n - 2^k` with `k` the number
/// of non-degenerate parameters. `v > 1` is trivially zero. The cap
/// applies to the source width `n`; the gadget enumerations run two
/// coordinates wider.
pub fn solve_pmfequals_via_tv(instance: &PmfEqualsInstance, cap: Cap) -> Result<u64> {
    let n = instance.n();
    cap.check(n)?;
    let v = instance.value();
    if v.is_zero() {
        let free = instance
            .params()
            .iter()
            .filter(|p| !p.is_zero() && !p.is_one())
            .count();
        return Ok((1u64 << n) - (1u64 << free));
    }
    if v > &Rational::one() {
        return Ok(0);
    }
    let artifacts = build_gadgets(instance)?;
    let gadget_cap = Cap(cap.0 + 2);
    let tv_prime = tv_positive_part(&artifacts.prime_p, &artifacts.prime_q, gadget_cap)?;
    let tv_hat = tv_positive_part(&artifacts.hat_p, &artifacts.hat_q, gadget_cap)?;
    recover_count(&artifacts, &tv_prime, &tv_hat)
}

/// `#SubsetProd` solved through the whole chain: instance map, gadgets,
/// two TV distances, recovery.
pub fn solve_subsetprod_via_tv(instance: &SubsetProdInstance, cap: Cap) -> Result<u64> {
    solve_pmfequals_via_tv(&subsetprod_to_pmfequals(instance), cap)
}
