//! Admissible prime-tuple machinery, a covering construction that forces
//! tuple primes to be consecutive, and scanners that exhibit the resulting
//! prime gaps empirically.
//!
//! The pieces fit together like this:
//!
//! * [`primes`] — sieves and primality tests (exact below 2^64, compound
//!   probable-prime above).
//! * [`tuples`] — the tuple calculus: residue counts, admissibility,
//!   difference sets, transforms, generators, and truncated log-space
//!   singular-series sums.
//! * [`construction`] — from an admissible tuple H and multiplier m,
//!   derive the exception set, covering primes, shift b, and modulus q,
//!   and independently re-verify all of it.
//! * [`scan`] — hunt n-ranges for tuples `{q*n + b + m*h_i}` holding two
//!   or more primes, confirm adjacent prime pairs are consecutive in the
//!   integers, and aggregate gap statistics; plus gap scans inside one
//!   arithmetic progression.

pub mod construction;
pub mod error;
pub mod primes;
pub mod scan;
pub mod tuples;

mod serde_util;

pub use error::{Error, Result};
pub use tuples::Tuple;
