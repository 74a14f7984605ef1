//! Exact total variation distance via its three equivalent definitions:
//! the max over events, the half-sum of absolute pmf differences, and the
//! sum of positive parts. The three are implemented independently — none
//! delegates to another — so their agreement on every input is a genuine
//! cross-check of the identities rather than a tautology.
//!
//! [`accepting_path_count`] is the counting-class membership argument made
//! executable: with `M` the product of all parameter denominators (and
//! complements), every `M * |P(x) - Q(x)|` is an integer, and summing them
//! counts exactly the accepting pairs `(x, z)` of the guess-and-check
//! machine, which is `2 M` times the TV distance. The nondeterministic
//! branching is never simulated; the closed-form sum counts the same paths.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::product::{Cap, ProductDistribution};
use crate::rational::{common_denominator, Rational};

/// TV value together with the event that attains the max-over-events form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TvResult {
    pub value: Rational,
    /// Sorted outcome indices of `{x : P(x) > Q(x)}`. Ties are excluded:
    /// outcomes with `P(x) = Q(x)` change no event's advantage.
    pub witness_event: Vec<u64>,
}

/// The accepting-path accounting for one pair of distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    /// Product of the denominators of all 4n parameter values and
    /// complements.
    pub m: BigUint,
    /// `sum_x M * |P(x) - Q(x)|`, an exact integer by construction.
    pub accepting_paths: BigUint,
    /// `accepting_paths / (2 M)`; equals the TV distance.
    pub tv_from_paths: Rational,
}

fn common_width(p: &ProductDistribution, q: &ProductDistribution, cap: Cap) -> Result<usize> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch { left: p.n(), right: q.n() });
    }
    cap.check(p.n())?;
    Ok(p.n())
}

/// `1/2 * sum_x |P(x) - Q(x)|`.
pub fn tv_half_abs(p: &ProductDistribution, q: &ProductDistribution, cap: Cap) -> Result<Rational> {
    let n = common_width(p, q, cap)?;
    let sp = p.split_tables(cap)?;
    let sq = q.split_tables(cap)?;
    let mut sum = Rational::zero();
    for x in 0..1u64 << n {
        sum = sum + (sp.at(x) - sq.at(x)).abs();
    }
    Ok(sum * Rational::one_half())
}

/// `sum_x max(0, P(x) - Q(x))`.
pub fn tv_positive_part(
    p: &ProductDistribution,
    q: &ProductDistribution,
    cap: Cap,
) -> Result<Rational> {
    let n = common_width(p, q, cap)?;
    let sp = p.split_tables(cap)?;
    let sq = q.split_tables(cap)?;
    let mut sum = Rational::zero();
    for x in 0..1u64 << n {
        let diff = sp.at(x) - sq.at(x);
        if !diff.is_negative() {
            sum = sum + diff;
        }
    }
    Ok(sum)
}

/// `max_S (P(S) - Q(S))`, reporting the maximizing event itself. The value
/// is computed as the literal mass difference of that event.
pub fn tv_max_event(
    p: &ProductDistribution,
    q: &ProductDistribution,
    cap: Cap,
) -> Result<TvResult> {
    let n = common_width(p, q, cap)?;
    let sp = p.split_tables(cap)?;
    let sq = q.split_tables(cap)?;
    let mut witness_event = Vec::new();
    let mut p_mass = Rational::zero();
    let mut q_mass = Rational::zero();
    for x in 0..1u64 << n {
        let px = sp.at(x);
        let qx = sq.at(x);
        if px > qx {
            witness_event.push(x);
            p_mass = p_mass + px;
            q_mass = q_mass + qx;
        }
    }
    Ok(TvResult { value: p_mass - q_mass, witness_event })
}

/// Counts the accepting paths of the guess-and-check machine: guess an
/// outcome `x` and an integer `1 <= z <= M |P(x) - Q(x)|`. Every per-term
/// product must come out integral; a fractional term or a mismatch against
/// `2 M * tv` is reported as an invariant violation, never absorbed.
pub fn accepting_path_count(
    p: &ProductDistribution,
    q: &ProductDistribution,
    cap: Cap,
) -> Result<MembershipReport> {
    let n = common_width(p, q, cap)?;
    let mut all_params: Vec<Rational> = p.params().to_vec();
    all_params.extend_from_slice(q.params());
    let m = common_denominator(&all_params)?;
    let m_rat = Rational::integer(num_bigint::BigInt::from(m.clone()));

    let sp = p.split_tables(cap)?;
    let sq = q.split_tables(cap)?;
    let mut accepting_paths = BigUint::zero();
    for x in 0..1u64 << n {
        let term = (&m_rat * &(sp.at(x) - sq.at(x))).abs();
        if !term.is_integer() {
            return Err(Error::Invariant(alloc::format!(
                "M|P(x)-Q(x)| is not an integer at outcome {x}: {term}"
            )));
        }
        accepting_paths += term.numer().magnitude();
    }

    let tv = tv_half_abs(p, q, cap)?;
    let two_m_tv = Rational::integer(2) * &m_rat * &tv;
    if Rational::integer(num_bigint::BigInt::from(accepting_paths.clone())) != two_m_tv {
        return Err(Error::Invariant(alloc::format!(
            "accepting paths {accepting_paths} != 2*M*tv = {two_m_tv}"
        )));
    }
    let tv_from_paths = Rational::new(
        num_bigint::BigInt::from(accepting_paths.clone()),
        num_bigint::BigInt::from(m.clone()) * 2,
    )?;
    Ok(MembershipReport { m, accepting_paths, tv_from_paths })
}
