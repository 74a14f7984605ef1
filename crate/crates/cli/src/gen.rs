//! Seeded pseudo-random instance generation. Everything is derived from a
//! ChaCha stream, so a `(kind, flags, seed)` tuple always reproduces the
//! same instance, byte for byte, across platforms.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tvlab_core::reduction::{PmfEqualsInstance, SubsetProdInstance};
use tvlab_core::{BigUint, Outcome, ProductDistribution, Rational};

/// How Bernoulli parameters are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamStyle {
    /// Binary fractions `a / 2^bits` with `a` uniform in `0..=2^bits`.
    Dyadic { bits: u32 },
    /// General rationals `a / b` with `b` uniform in `1..=denom_max` and
    /// `a` uniform in `0..=b`.
    General { denom_max: u64 },
}

pub fn rational_param(rng: &mut ChaCha8Rng, style: ParamStyle) -> Rational {
    let (num, den) = match style {
        ParamStyle::Dyadic { bits } => {
            let den = 1u64 << bits.min(32);
            (rng.random_range(0..=den), den)
        }
        ParamStyle::General { denom_max } => {
            let den = rng.random_range(1..=denom_max.max(1));
            (rng.random_range(0..=den), den)
        }
    };
    Rational::new(num, den).expect("positive denominator")
}

pub fn product(rng: &mut ChaCha8Rng, n: usize, style: ParamStyle) -> ProductDistribution {
    let params = (0..n).map(|_| rational_param(rng, style)).collect();
    ProductDistribution::new(params).expect("generated parameters are in range")
}

pub fn pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    style: ParamStyle,
) -> (ProductDistribution, ProductDistribution) {
    let p = product(rng, n, style);
    let q = product(rng, n, style);
    (p, q)
}

/// A pmf-equals instance. With `planted`, `v` is the pmf of a uniformly
/// chosen outcome and is therefore attained at least once.
pub fn pmfequals(
    rng: &mut ChaCha8Rng,
    n: usize,
    style: ParamStyle,
    planted: bool,
) -> PmfEqualsInstance {
    let dist = product(rng, n, style);
    let v = if planted {
        let index = rng.random_range(0..1u64 << n.min(62));
        dist.pmf(&Outcome::new(index, n).expect("index in range")).expect("matching width")
    } else {
        rational_param(rng, style)
    };
    PmfEqualsInstance::new(dist.params().to_vec(), v).expect("generated instance is valid")
}

/// A subset-product instance with items in `1..=a_max`. With `planted`,
/// the target is the product over a uniformly chosen subset, so the
/// solution count is at least 1; otherwise the target is uniform in
/// `1..=a_max`.
pub fn subsetprod(
    rng: &mut ChaCha8Rng,
    n: usize,
    a_max: u64,
    planted: bool,
) -> SubsetProdInstance {
    let items: Vec<u64> = (0..n).map(|_| rng.random_range(1..=a_max.max(1))).collect();
    let target = if planted {
        let mask = rng.random_range(0..1u64 << n.min(62));
        items
            .iter()
            .enumerate()
            .filter(|&(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, &a)| BigUint::from(a))
            .product::<BigUint>()
            .max(BigUint::from(1u32))
    } else {
        BigUint::from(rng.random_range(1..=a_max.max(1)))
    };
    SubsetProdInstance::new(items.into_iter().map(BigUint::from).collect(), target)
        .expect("generated instance is valid")
}
