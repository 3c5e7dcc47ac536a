//! Bit-packed sieve of Eratosthenes.
//!
//! The table stores one bit per odd integer (2 is special-cased), so a
//! sieve up to 10^9 costs ~62 MiB. Construction walks the table in
//! cache-sized segments using base primes up to sqrt(limit), and the same
//! segment machinery backs [`for_primes_in_range`] for windowed scans that
//! never materialize a full table.

use crate::error::{Error, Result};

/// Default cap on the bit table, in bytes. 256 MiB covers limits past
/// 4*10^9; anything larger should go through `for_primes_in_range`.
pub const DEFAULT_TABLE_BUDGET: usize = 256 << 20;

/// Bits marked per segment pass. 256 Kbit = 32 KiB fits comfortably in L2.
const SEGMENT_BITS: usize = 1 << 18;

/// Queryable primality table for `[0, limit]` plus ascending prime iteration.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    /// Bit `i` set  <=>  `2*i + 1` is prime. Bit 0 (the integer 1) is clear.
    words: Vec<u64>,
}

impl PrimeSieve {
    /// Sieve all primes up to `limit` inclusive, under the default memory budget.
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_TABLE_BUDGET)
    }

    /// Sieve with an explicit byte budget for the bit table.
    pub fn with_budget(limit: u64, budget_bytes: usize) -> Result<Self> {
        // One bit per odd integer in [1, limit], at least one bit so the
        // bitmap is never empty.
        let n_bits = (limit as u128).div_ceil(2).max(1);
        if n_bits.div_ceil(8) > budget_bytes as u128 {
            return Err(Error::resource(format!(
                "sieve to {limit} needs {} bytes, budget is {budget_bytes}",
                n_bits.div_ceil(8)
            )));
        }
        let n_bits = n_bits as usize;
        let mut words = vec![u64::MAX; n_bits.div_ceil(64)];

        // Clear padding past the last odd <= limit so popcounts are exact.
        let tail = n_bits % 64;
        if tail != 0 {
            *words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        clear_bit(&mut words, 0); // the integer 1

        if limit < 3 {
            words.fill(0);
        } else if limit >= 9 {
            let base = base_primes(isqrt(limit));
            // Mark composites segment by segment. `next[i]` tracks the bit
            // index of the next unmarked multiple of base[i].
            let mut next: Vec<usize> = base.iter().map(|&p| ((p * p) / 2) as usize).collect();
            let mut seg_start = 0usize;
            while seg_start < n_bits {
                let seg_end = (seg_start + SEGMENT_BITS).min(n_bits);
                for (i, &p) in base.iter().enumerate() {
                    let step = p as usize;
                    let mut idx = next[i];
                    while idx < seg_end {
                        clear_bit(&mut words, idx);
                        idx += step;
                    }
                    next[i] = idx;
                }
                seg_start = seg_end;
            }
        }

        Ok(PrimeSieve { limit, words })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Exact table lookup; `n` must be within `[0, limit]`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "query {n} beyond sieve limit {}",
            self.limit
        );
        if n == 2 {
            return true;
        }
        if n < 2 || n.is_multiple_of(2) {
            return false;
        }
        test_bit(&self.words, (n / 2) as usize)
    }

    /// Number of primes in `[0, limit]`.
    pub fn count(&self) -> u64 {
        let odd: u64 = self.words.iter().map(|w| w.count_ones() as u64).sum();
        if self.limit >= 2 {
            odd + 1
        } else {
            odd
        }
    }

    /// Primes in strictly increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let two = if self.limit >= 2 { Some(2u64) } else { None };
        two.into_iter().chain(
            self.words
                .iter()
                .enumerate()
                .flat_map(|(wi, &w)| BitIter {
                    word: w,
                    base: wi * 64,
                })
                .map(|bit| 2 * bit as u64 + 1),
        )
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

#[inline]
fn clear_bit(words: &mut [u64], idx: usize) {
    words[idx / 64] &= !(1u64 << (idx % 64));
}

#[inline]
fn test_bit(words: &[u64], idx: usize) -> bool {
    words[idx / 64] & (1u64 << (idx % 64)) != 0
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    // f64 rounding can land one off in either direction.
    let mut r = (n as f64).sqrt() as u64;
    while r as u128 * r as u128 > n as u128 {
        r -= 1;
    }
    while (r as u128 + 1) * (r as u128 + 1) <= n as u128 {
        r += 1;
    }
    r
}

/// Odd primes up to `bound` inclusive, by plain non-segmented sieving.
fn base_primes(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n_bits = bound.div_ceil(2) as usize;
    let mut odd = vec![true; n_bits];
    odd[0] = false;
    let mut p = 3u64;
    while p * p <= bound {
        if odd[(p / 2) as usize] {
            let mut idx = (p * p) / 2;
            while (idx as usize) < n_bits {
                odd[idx as usize] = false;
                idx += p;
            }
        }
        p += 2;
    }
    odd.iter()
        .enumerate()
        .filter(|(_, &alive)| alive)
        .map(|(i, _)| 2 * i as u64 + 1)
        .collect()
}

/// Visit every prime in `[lo, hi)` in increasing order without building a
/// full table: windows of `SEGMENT_BITS` odds are sieved by base primes up
/// to sqrt(hi).
pub fn for_primes_in_range(lo: u64, hi: u64, mut visit: impl FnMut(u64)) {
    if hi <= 2 || hi <= lo {
        return;
    }
    if lo <= 2 {
        visit(2);
    }
    let base = base_primes(isqrt(hi - 1));
    let mut window = vec![0u64; SEGMENT_BITS / 64];

    // Bit idx stands for the odd value 2*idx + 1.
    let first_idx = lo.max(3) / 2;
    let end_idx = hi / 2; // count of odds below hi
    let mut w_lo = first_idx;
    while w_lo < end_idx {
        let w_hi = (w_lo + SEGMENT_BITS as u64).min(end_idx);
        let len = (w_hi - w_lo) as usize;
        window.fill(u64::MAX);
        let low_val = 2 * w_lo + 1;
        for &p in &base {
            // Smallest odd multiple of p that is >= low_val and >= p^2.
            let p = p as u128;
            let mut mult = (low_val as u128).div_ceil(p) * p;
            if mult < p * p {
                mult = p * p;
            }
            if mult.is_multiple_of(2) {
                mult += p;
            }
            let mut idx = ((mult / 2) - w_lo as u128) as usize;
            let step = p as usize;
            while idx < len {
                window[idx / 64] &= !(1u64 << (idx % 64));
                idx += step;
            }
        }
        for idx in 0..len {
            if window[idx / 64] & (1u64 << (idx % 64)) != 0 {
                visit(2 * (w_lo + idx as u64) + 1);
            }
        }
        w_lo = w_hi;
    }
}
