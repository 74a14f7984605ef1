//! Exact computation of total variation distance between product Bernoulli
//! distributions, together with the counting machinery that makes the exact
//! problem hard and the tensorizing divergences that stay easy.
//!
//! Everything here is computed in arbitrary-precision rational arithmetic:
//! no floating point enters any probability computation. The crate has three
//! layers:
//!
//! - [`rational`] and [`product`]: exact rationals with dyadic/denominator
//!   accounting, and product-of-Bernoulli distributions over `{0,1}^n`.
//! - [`tv`]: the three equivalent definitions of TV distance, implemented
//!   independently so their agreement is a real cross-check, plus the
//!   accepting-path count that places exact TV in a counting class.
//! - [`reduction`] and [`oracle`]: the constructive chain
//!   `#SubsetProd -> #PMFEquals -> two TV queries`, with brute-force
//!   counters as independent ground truth.
//!
//! [`divergence`] holds the contrast: KL, chi-square and squared Hellinger
//! tensorize over the marginals, so their closed forms are linear in `n`
//! while exact TV is gated behind an enumeration cap.
//!
//! The crate is `no_std` (with `alloc`); all IO, JSON and CLI surface lives
//! in the companion `tvlab` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod decimal;
pub mod divergence;
mod error;
pub mod oracle;
pub mod product;
pub mod rational;
pub mod reduction;
pub mod tv;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
pub use product::{Cap, Outcome, ProductDistribution};
pub use rational::{common_denominator, BitProfile, Rational};
