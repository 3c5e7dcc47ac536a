//! Prime generation and primality testing: the substrate for the tuple
//! calculus, the covering construction, and the scanners.

mod primality;
mod sieve;

pub use primality::{
    classify, is_prime, is_prime_u64, next_prime_above, next_prime_above_u64, Primality,
};
pub use sieve::{for_primes_in_range, PrimeSieve, DEFAULT_TABLE_BUDGET};

use crate::error::{Error, Result};
use num_integer::Integer;

/// Sieve all primes up to `limit` inclusive.
pub fn sieve_primes(limit: u64) -> Result<PrimeSieve> {
    PrimeSieve::new(limit)
}

/// All primes `p <= limit` with `p ≡ b (mod q)`, in increasing order.
///
/// Requires `0 <= b < q` and `gcd(b, q) = 1`; otherwise the progression
/// carries at most one prime and the scan is refused.
pub fn primes_in_ap(b: u64, q: u64, limit: u64) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::precondition("modulus q must be positive"));
    }
    if b >= q {
        return Err(Error::precondition(format!(
            "residue b = {b} must lie in [0, q) with q = {q}"
        )));
    }
    if b.gcd(&q) != 1 {
        return Err(Error::precondition(format!(
            "gcd(b, q) = {} != 1 for b = {b}, q = {q}",
            b.gcd(&q)
        )));
    }
    // The collected output grows like limit / (phi(q) ln limit); past 1e10
    // it stops being a desk-side scan and starts being an OOM.
    if limit > 10_000_000_000 {
        return Err(Error::resource(format!(
            "progression scan capped at 10^10, got limit = {limit}"
        )));
    }
    let mut out = Vec::new();
    for_primes_in_range(2, limit.saturating_add(1), |p| {
        if p % q == b {
            out.push(p);
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ap_residue_one_mod_six() {
        assert_eq!(primes_in_ap(1, 6, 40).unwrap(), vec![7, 13, 19, 31, 37]);
    }

    #[test]
    fn ap_odd_primes() {
        assert_eq!(
            primes_in_ap(1, 2, 20).unwrap(),
            vec![3, 5, 7, 11, 13, 17, 19]
        );
    }

    #[test]
    fn ap_rejects_shared_factor() {
        let err = primes_in_ap(2, 4, 100).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn ap_rejects_out_of_range_residue() {
        assert!(primes_in_ap(7, 6, 100).is_err());
        assert!(primes_in_ap(0, 0, 100).is_err());
    }

    #[test]
    fn ap_degenerate_modulus_one() {
        // gcd(0, 1) = 1: every prime <= limit
        assert_eq!(primes_in_ap(0, 1, 10).unwrap(), vec![2, 3, 5, 7]);
    }

    #[test]
    fn ap_matches_sieve_filter() {
        let sieve = sieve_primes(50_000).unwrap();
        for (b, q) in [(1u64, 4u64), (3, 4), (2, 5), (5, 8)] {
            let expect: Vec<u64> = sieve.iter().filter(|p| p % q == b).collect();
            assert_eq!(primes_in_ap(b, q, 50_000).unwrap(), expect, "b={b} q={q}");
        }
    }

    #[test]
    fn is_prime_agrees_with_sieve_to_a_million() {
        let sieve = sieve_primes(1_000_000).unwrap();
        for n in 0..=1_000_000u64 {
            assert_eq!(is_prime_u64(n), sieve.is_prime(n), "n = {n}");
        }
    }
}
