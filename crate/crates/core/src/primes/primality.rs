//! Primality testing.
//!
//! Below 2^64 the answer is exact: a strong-pseudoprime (Miller-Rabin)
//! test over the fixed witness set {2, 325, 9375, 28178, 450775, 9780504,
//! 1795265022}, which is known to be deterministic for every n < 2^64
//! (Sinclair's seven-base set, exhaustively verified by the Feitsma/Galway
//! pseudoprime census). At or above 2^64 we run a Baillie-PSW compound
//! test (strong base-2 pseudoprime check plus a strong Lucas check with
//! Selfridge's parameters); no composite is known to pass it, but callers
//! must surface such verdicts as "probable prime".

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Verdict of [`classify`], tracking certainty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    /// Exact verdict (n < 2^64, deterministic witness set).
    Prime,
    /// n >= 2^64 and passes Baillie-PSW; no counterexample is known.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        self != Primality::Composite
    }

    /// True when the verdict came from the compound test rather than the
    /// deterministic one.
    pub fn is_probable(self) -> bool {
        self == Primality::ProbablePrime
    }
}

/// Witnesses making Miller-Rabin deterministic for all n < 2^64.
const WITNESSES_U64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &WITNESSES_U64 {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Classify an arbitrary-precision candidate.
pub fn classify(n: &BigUint) -> Primality {
    if let Some(small) = n.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    // n >= 2^64 from here on.
    if n.is_even() {
        return Primality::Composite;
    }
    for p in SMALL_PRIMES {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    if !strong_base2(n) {
        return Primality::Composite;
    }
    if !strong_lucas_selfridge(n) {
        return Primality::Composite;
    }
    Primality::ProbablePrime
}

/// True iff `n` is prime (or passes the compound probable-prime test when
/// n >= 2^64). Use [`classify`] when the certainty matters.
pub fn is_prime(n: &BigUint) -> bool {
    classify(n).is_prime()
}

/// The smallest prime strictly greater than `n`.
pub fn next_prime_above(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if *n < two {
        return two;
    }
    let mut candidate = n + 1u32;
    if candidate.is_even() {
        candidate += 1u32;
    }
    while !is_prime(&candidate) {
        candidate += 2u32;
    }
    candidate
}

/// u64 variant of [`next_prime_above`]; `None` if the next prime would not
/// fit a machine word.
pub fn next_prime_above_u64(n: u64) -> Option<u64> {
    if n < 2 {
        return Some(2);
    }
    let mut candidate = n.checked_add(1)?;
    if candidate % 2 == 0 {
        candidate = candidate.checked_add(1)?;
    }
    loop {
        if is_prime_u64(candidate) {
            return Some(candidate);
        }
        candidate = candidate.checked_add(2)?;
    }
}

const SMALL_PRIMES: [u32; 46] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211,
];

/// Strong pseudoprime test to base 2; `n` odd, n > 2.
fn strong_base2(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(2u32).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd n > 0.
fn jacobi(a: &BigInt, n: &BigUint) -> i32 {
    let n = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n);
    let mut n = n;
    let mut result = 1i32;
    let three = BigInt::from(3u32);
    let five = BigInt::from(5u32);
    let eight = BigInt::from(8u32);
    let four = BigInt::from(4u32);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameter choice
/// (method A): first D in 5, -7, 9, -11, ... with (D/n) = -1, P = 1,
/// Q = (1 - D) / 4. `n` odd, no factor among SMALL_PRIMES.
fn strong_lucas_selfridge(n: &BigUint) -> bool {
    // Find D.
    let mut d_abs = 5i64;
    let mut sign = 1i64;
    let d = loop {
        let d = BigInt::from(sign * d_abs);
        match jacobi(&d, n) {
            -1 => break d,
            0 => {
                // Shares a factor with n; composite unless n == |D|.
                return BigUint::from(d_abs as u64) == *n;
            }
            _ => {}
        }
        if d_abs == 13 && sign == 1 {
            // A perfect square never yields (D/n) = -1; cut the search.
            let r = n.sqrt();
            if &r * &r == *n {
                return false;
            }
        }
        d_abs += 2;
        sign = -sign;
    };

    let n_int = BigInt::from(n.clone());
    let one = BigInt::one();
    let q: BigInt = (&one - &d) / 4; // P = 1
    let n_plus_1: BigUint = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let t: BigUint = &n_plus_1 >> s; // n + 1 = t * 2^s, t odd

    // Compute U_t, V_t, Q^t mod n by binary expansion of t (MSB first).
    let mut u = BigInt::zero();
    let mut v = BigInt::from(2u32);
    let mut qk = one.clone(); // Q^(current k)
    let bits = t.bits();
    for i in (0..bits).rev() {
        // (U, V, qk) for k -> 2k
        let u2 = (&u * &v).mod_floor(&n_int);
        let v2 = (&v * &v - (&qk << 1u32)).mod_floor(&n_int);
        qk = (&qk * &qk).mod_floor(&n_int);
        u = u2;
        v = v2;
        if t.bit(i) {
            // 2k -> 2k + 1, dividing by 2 modulo the odd n
            let mut u1 = &u + &v; // P = 1
            let mut v1 = &d * &u + &v;
            if u1.is_odd() {
                u1 += &n_int;
            }
            if v1.is_odd() {
                v1 += &n_int;
            }
            u = (u1 >> 1u32).mod_floor(&n_int);
            v = (v1 >> 1u32).mod_floor(&n_int);
            qk = (&qk * &q).mod_floor(&n_int);
        }
    }

    if u.is_zero() || v.is_zero() {
        return true;
    }
    // V_{t*2^r} for 1 <= r < s
    for _ in 1..s {
        v = (&v * &v - (&qk << 1u32)).mod_floor(&n_int);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&n_int);
    }
    false
}

/// Baillie-PSW on an arbitrary odd candidate, exposed for the test suite.
#[cfg(test)]
pub(crate) fn bpsw(n: &BigUint) -> bool {
    strong_base2(n) && strong_lucas_selfridge(n)
}
