//! Exact evaluation of gcd-sum generalizations over k-tuples with bounded
//! product, together with the quotient-block summation machinery behind the
//! fast paths and a numeric engine that validates the leading-term
//! asymptotics against exact data.
//!
//! The three target quantities, all over ordered k-tuples with
//! `x_1 * ... * x_k <= x`:
//!
//! * `A_k(x)` — the sum of `F(gcd(x_1, ..., x_k))` for a weight F,
//! * `B_k(x)` — the number of tuples with overall gcd 1,
//! * `S_k(x)` — the number of pairwise-coprime tuples, which equals
//!   `sum_{n<=x} k^omega(n)`.
//!
//! Fast paths reduce everything to the divisor summatory function
//! `T_k(x) = sum_{n<=x} tau_k(n)` through Moebius inversion over k-th-power
//! dilations; brute-force enumerators double as oracles.

// sieve-style forward DP over index arrays reads better with explicit loops
#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod arith;
pub mod asymptotics;
pub mod error;
pub mod gcd_sums;
pub mod summatory;

pub use error::{Error, Result};
