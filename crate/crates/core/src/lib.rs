//! Modified zeta functions `ζ_K(s) = Σ_{n∈K} n^{−s}` over multiplicative
//! semigroups `K ⊂ ℕ` generated by a set of primes, together with the tools
//! that decide their behaviour near `s = 1`:
//!
//! * [`semigroup`]: generation of `K` up to a bound, its density `A` from the
//!   Euler product over the complementary primes, and the counting-ratio check.
//! * [`zeta`]: certified evaluation of `ζ_K`, `ψ_K` and the complementary
//!   Euler product `ζ_J`.
//! * [`frequency`]: the frequency set `L = ⋃ ±[log k, log(k+1))` and its
//!   window measures.
//! * [`frame`]: the matrix of the frame operator on `L²(−T, T)` in a
//!   sinc basis, with tail corrections and spectra.
//! * [`constructions`]: two prime sets separating density from the prime
//!   number theorem, with verification reports.
//! * [`lp`]: `L^q` norm ladders, summability scans and weighted sums over
//!   the complementary semigroup.
//! * [`suite`]: the numbered acceptance battery.
//!
//! Hot loops run on rayon through [`exec::Execution`]; building without the
//! `parallel` feature gives the same results sequentially.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constructions;
pub mod discrepancy;
pub mod error;
pub mod exec;
pub mod frame;
pub mod frequency;
pub mod lp;
pub mod primes;
pub mod selector;
pub mod semigroup;
pub mod special;
pub mod suite;
pub mod sum;
pub mod trend;
pub mod zeta;
