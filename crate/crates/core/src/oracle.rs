//! Independent brute-force counters for the two counting problems. These
//! are the ground truth every reduction is checked against, so they share
//! no arithmetic path with the reduction or TV machinery beyond the
//! `Rational` type itself: subset products multiply raw big integers and
//! the pmf counter multiplies parameters directly.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::reduction::{PmfEqualsInstance, SubsetProdInstance};

/// Work bound for exhaustive enumeration: both counters walk `2^max_n`
/// cases at most.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: usize,
}

impl OracleBudget {
    pub const DEFAULT: OracleBudget = OracleBudget { max_n: 24 };

    fn check(self, n: usize) -> Result<()> {
        let effective = self.max_n.min(62);
        if n <= effective {
            Ok(())
        } else {
            Err(Error::CapExceeded { n, cap: effective })
        }
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget::DEFAULT
    }
}

/// Number of subsets `S` with `prod_{i in S} a_i = T`, by exhaustive
/// enumeration with exact integer products. The empty product is 1.
pub fn brute_subsetprod(instance: &SubsetProdInstance, budget: OracleBudget) -> Result<u64> {
    budget.check(instance.n())?;
    Ok(count_subsets(instance.items(), &BigUint::one(), instance.target()))
}

fn count_subsets(rest: &[BigUint], acc: &BigUint, target: &BigUint) -> u64 {
    match rest.split_first() {
        None => u64::from(acc == target),
        Some((first, tail)) => {
            let mut count = count_subsets(tail, acc, target);
            let with = acc * first;
            // every item is >= 1, so a partial product past the target can
            // never come back down
            if with <= *target {
                count += count_subsets(tail, &with, target);
            }
            count
        }
    }
}

/// Number of outcomes `x` with `P(x) = v`, by exhaustive enumeration and
/// exact rational equality.
pub fn brute_pmfequals(instance: &PmfEqualsInstance, budget: OracleBudget) -> Result<u64> {
    let n = instance.n();
    budget.check(n)?;
    let params = instance.params();
    let mut count = 0u64;
    for x in 0..1u64 << n {
        let mut mass = Rational::one();
        for (coord, p) in params.iter().enumerate() {
            if (x >> coord) & 1 == 1 {
                mass = mass * p;
            } else {
                mass = mass * p.complement();
            }
        }
        if &mass == instance.value() {
            count += 1;
        }
    }
    Ok(count)
}
