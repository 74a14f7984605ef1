//! Product-of-Bernoulli distributions over `{0,1}^n` with exact pmf
//! evaluation and capped domain enumeration.
//!
//! Outcomes are canonically encoded least-significant-bit-first: bit `j` of
//! the index gives coordinate `j+1`. Nothing in the math fixes an order, but
//! a canonical one is required for reproducible streams and JSON fixtures.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Ceiling on enumeration width: work and memory scale with `2^n`, so a
/// width past the cap is refused rather than silently slow. The library
/// default is 24; the CLI can override it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cap(pub usize);

impl Cap {
    pub const DEFAULT: Cap = Cap(24);

    pub fn check(self, n: usize) -> Result<()> {
        // u64 outcome indices put an absolute ceiling just below 2^63.
        let effective = self.0.min(62);
        if n <= effective {
            Ok(())
        } else {
            Err(Error::CapExceeded { n, cap: effective })
        }
    }
}

impl Default for Cap {
    fn default() -> Self {
        Cap::DEFAULT
    }
}

/// A point of `{0,1}^n`, stored as its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome {
    index: u64,
    n: usize,
}

impl Outcome {
    pub fn new(index: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 62 {
            return Err(Error::Domain(alloc::format!(
                "outcome width must be in 1..=62, got {n}"
            )));
        }
        if index >= (1u64 << n) {
            return Err(Error::Domain(alloc::format!(
                "index {index} out of range for {n} coordinates"
            )));
        }
        Ok(Outcome { index, n })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value of coordinate `coord + 1` (zero-based accessor).
    pub fn bit(&self, coord: usize) -> bool {
        (self.index >> coord) & 1 == 1
    }
}

impl fmt::Display for Outcome {
    /// Renders in coordinate order, e.g. index 1 over n = 2 is `10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for coord in 0..self.n {
            write!(f, "{}", u8::from(self.bit(coord)))?;
        }
        Ok(())
    }
}

/// Yields all `2^n` outcomes exactly once, in increasing index order.
pub fn enumerate_outcomes(n: usize, cap: Cap) -> Result<impl Iterator<Item = Outcome>> {
    if n == 0 {
        return Err(Error::Domain("enumeration needs at least one coordinate".into()));
    }
    cap.check(n)?;
    Ok((0..1u64 << n).map(move |index| Outcome { index, n }))
}

/// An ordered vector of Bernoulli parameters: `params[i]` is the probability
/// that coordinate `i+1` equals 1. Parameters may be degenerate (0 or 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDistribution {
    params: Vec<Rational>,
}

impl ProductDistribution {
    pub fn new(params: Vec<Rational>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Domain("a product distribution needs n >= 1 parameters".into()));
        }
        for (i, p) in params.iter().enumerate() {
            if !p.in_unit_interval() {
                return Err(Error::Domain(alloc::format!(
                    "parameter {} = {p} is outside [0,1]",
                    i + 1
                )));
            }
        }
        Ok(ProductDistribution { params })
    }

    /// `Bern(1/2)^n`, the reference measure of the hardness gadgets.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(alloc::vec![Rational::one_half(); n])
    }

    pub fn n(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[Rational] {
        &self.params
    }

    /// Exact point probability: the product of `p_i` over coordinates set in
    /// `x` and `1 - p_i` over the rest.
    pub fn pmf(&self, x: &Outcome) -> Result<Rational> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch { left: self.n(), right: x.n() });
        }
        let mut acc = Rational::one();
        for (coord, p) in self.params.iter().enumerate() {
            if x.bit(coord) {
                acc = acc * p;
            } else {
                acc = acc * p.complement();
            }
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Appends one more coordinate with parameter `p_new`, leaving the
    /// original parameters unchanged.
    pub fn extend(&self, p_new: Rational) -> Result<Self> {
        if !p_new.in_unit_interval() {
            return Err(Error::Domain(alloc::format!("parameter {p_new} is outside [0,1]")));
        }
        let mut params = self.params.clone();
        params.push(p_new);
        Ok(ProductDistribution { params })
    }

    /// Full pmf table indexed by outcome, built by coordinate doubling in
    /// `2^(n+1)` multiplications.
    pub fn pmf_table(&self, cap: Cap) -> Result<Vec<Rational>> {
        cap.check(self.n())?;
        Ok(table_over(&self.params))
    }

    /// The same pmf split as `low` and `high` tables over the first
    /// `floor(n/2)` and remaining coordinates, so that
    /// `pmf(x) = low[x & mask] * high[x >> n_low]`. Memory drops from
    /// `2^n` to `2^(n/2 + 1)` entries, which is what makes wide (but still
    /// capped) enumerations feasible.
    pub fn split_tables(&self, cap: Cap) -> Result<SplitPmf> {
        cap.check(self.n())?;
        let n_low = self.n() / 2;
        Ok(SplitPmf {
            low: table_over(&self.params[..n_low]),
            high: table_over(&self.params[n_low..]),
            n_low,
        })
    }
}

fn table_over(params: &[Rational]) -> Vec<Rational> {
    let mut table = alloc::vec![Rational::one()];
    for p in params {
        let q = p.complement();
        let mut next = Vec::with_capacity(table.len() * 2);
        next.extend(table.iter().map(|v| v * &q));
        next.extend(table.iter().map(|v| v * p));
        table = next;
    }
    table
}

/// Pmf of a product distribution factored over two halves of the coordinates.
pub struct SplitPmf {
    low: Vec<Rational>,
    high: Vec<Rational>,
    n_low: usize,
}

impl SplitPmf {
    pub fn at(&self, index: u64) -> Rational {
        let mask = (1u64 << self.n_low) - 1;
        &self.low[(index & mask) as usize] * &self.high[(index >> self.n_low) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn dist(params: &[(i64, i64)]) -> ProductDistribution {
        ProductDistribution::new(params.iter().map(|&(n, d)| r(n, d)).collect()).unwrap()
    }

    fn outcome(index: u64, n: usize) -> Outcome {
        Outcome::new(index, n).unwrap()
    }

    #[test]
    fn pmf_examples() {
        let p = dist(&[(1, 2), (1, 2)]);
        assert_eq!(p.pmf(&outcome(3, 2)).unwrap(), r(1, 4));

        let p = dist(&[(2, 3), (3, 4)]);
        assert_eq!(p.pmf(&outcome(3, 2)).unwrap(), r(1, 2));

        // "01" in coordinate order: coordinate 1 is 0, coordinate 2 is 1
        let p = dist(&[(1, 1), (1, 2)]);
        assert_eq!(p.pmf(&outcome(2, 2)).unwrap(), Rational::zero());
    }

    #[test]
    fn pmf_dimension_mismatch() {
        let p = dist(&[(1, 2)]);
        assert!(matches!(
            p.pmf(&outcome(0, 2)),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn enumeration_order_and_cap() {
        let idx: Vec<u64> = enumerate_outcomes(2, Cap::DEFAULT).unwrap().map(|o| o.index()).collect();
        assert_eq!(idx, alloc::vec![0, 1, 2, 3]);

        let n3: Vec<Outcome> = enumerate_outcomes(3, Cap::DEFAULT).unwrap().collect();
        assert_eq!(n3.len(), 8);

        assert!(matches!(
            enumerate_outcomes(5, Cap(4)),
            Err(Error::CapExceeded { n: 5, cap: 4 })
        ));
        assert!(enumerate_outcomes(0, Cap::DEFAULT).is_err());
    }

    #[test]
    fn outcome_display_is_coordinate_order() {
        assert_eq!(outcome(1, 2).to_string(), "10");
        assert_eq!(outcome(2, 2).to_string(), "01");
        assert_eq!(outcome(3, 3).to_string(), "110");
    }

    #[test]
    fn extend_examples() {
        let p = dist(&[(1, 2)]);
        let e = p.extend(Rational::one()).unwrap();
        assert_eq!(e.params(), &[r(1, 2), r(1, 1)]);
        assert_eq!(p.params().len(), 1);

        // deterministic last coordinate: pmf carries over at (x, 1)
        assert_eq!(e.pmf(&outcome(0b10, 2)).unwrap(), p.pmf(&outcome(0, 1)).unwrap());
        assert_eq!(e.pmf(&outcome(0b00, 2)).unwrap(), Rational::zero());

        assert!(p.extend(r(3, 2)).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ProductDistribution::new(alloc::vec![]).is_err());
        assert!(ProductDistribution::new(alloc::vec![r(3, 2)]).is_err());
        assert!(ProductDistribution::new(alloc::vec![r(-1, 2)]).is_err());
    }

    #[test]
    fn pmf_table_matches_pointwise_and_sums_to_one() {
        let p = dist(&[(2, 3), (3, 4), (1, 5), (0, 1), (1, 1), (5, 9)]);
        let table = p.pmf_table(Cap::DEFAULT).unwrap();
        let split = p.split_tables(Cap::DEFAULT).unwrap();
        let mut total = Rational::zero();
        for x in enumerate_outcomes(6, Cap::DEFAULT).unwrap() {
            let direct = p.pmf(&x).unwrap();
            assert_eq!(table[x.index() as usize], direct);
            assert_eq!(split.at(x.index()), direct);
            total = total + direct;
        }
        assert!(total.is_one());
    }

    #[test]
    fn pmf_sums_to_one_at_width_twelve() {
        let params: Vec<Rational> = (0..12).map(|i| r(i % 5, 5)).collect();
        let p = ProductDistribution::new(params).unwrap();
        let total = p
            .pmf_table(Cap::DEFAULT)
            .unwrap()
            .into_iter()
            .fold(Rational::zero(), |acc, v| acc + v);
        assert!(total.is_one());
    }

    fn arb_param() -> impl Strategy<Value = Rational> {
        (0i64..=24, 1i64..=24).prop_map(|(a, b)| {
            let b = b.max(a);
            r(a, b)
        })
    }

    proptest! {
        #[test]
        fn pmf_sums_to_one(params in proptest::collection::vec(arb_param(), 1..7)) {
            let n = params.len();
            let p = ProductDistribution::new(params).unwrap();
            let total = enumerate_outcomes(n, Cap::DEFAULT)
                .unwrap()
                .map(|x| p.pmf(&x).unwrap())
                .fold(Rational::zero(), |acc, v| acc + v);
            prop_assert!(total.is_one());
        }

        #[test]
        fn extend_factorizes(params in proptest::collection::vec(arb_param(), 1..6), p_new in arb_param(), idx in 0u64..32, b in proptest::bool::ANY) {
            let n = params.len();
            let p = ProductDistribution::new(params).unwrap();
            let e = p.extend(p_new.clone()).unwrap();
            let x = Outcome::new(idx & ((1 << n) - 1), n).unwrap();
            let extended = Outcome::new(x.index() | (u64::from(b) << n), n + 1).unwrap();
            let factor = if b { p_new } else { p_new.complement() };
            prop_assert_eq!(e.pmf(&extended).unwrap(), p.pmf(&x).unwrap() * factor);
        }
    }
}
