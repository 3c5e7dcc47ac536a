//! Tuple calculus: residue counting, admissibility, difference sets,
//! affine transforms, generators, and truncated singular-series sums.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::primes::{for_primes_in_range, is_prime_u64};

/// A strictly increasing set of non-negative integers `h_1 < ... < h_k`.
///
/// Classic tuples are normalized to start at 0, so zero is allowed as an
/// element even though most uses shift everything positive anyway.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    elements: Vec<u64>,
}

impl Tuple {
    /// Build a tuple from elements in any order. Rejects empty input and
    /// duplicate elements.
    pub fn new(mut elements: Vec<u64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::precondition("a tuple needs at least one element"));
        }
        elements.sort_unstable();
        for w in elements.windows(2) {
            if w[0] == w[1] {
                return Err(Error::precondition(format!("duplicate element {}", w[0])));
            }
        }
        Ok(Tuple { elements })
    }

    /// Parse the shared text format: integers separated by whitespace or
    /// commas, `#` starts a comment, elements need not be sorted.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut elements = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for token in line.split(|c: char| c.is_whitespace() || c == ',') {
                if token.is_empty() {
                    continue;
                }
                let value: u64 = token
                    .parse()
                    .map_err(|_| Error::parse(format!("bad tuple element {token:?}")))?;
                elements.push(value);
            }
        }
        Tuple::new(elements).map_err(|e| match e {
            Error::Precondition(msg) => Error::parse(msg),
            other => other,
        })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// Cardinality k.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // k >= 1 by construction
    }

    /// `h_k - h_1`.
    pub fn diameter(&self) -> u64 {
        self.elements[self.elements.len() - 1] - self.elements[0]
    }

    pub fn min(&self) -> u64 {
        self.elements[0]
    }

    pub fn max(&self) -> u64 {
        self.elements[self.elements.len() - 1]
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl Serialize for Tuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tuple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elements = Vec::<u64>::deserialize(d)?;
        Tuple::new(elements).map_err(serde::de::Error::custom)
    }
}

/// Verdict of the admissibility check plus the evidence behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Largest prime the decision procedure examined (0 when no prime
    /// needed checking, i.e. k = 1).
    pub checked_prime_bound: u64,
    pub failure: Option<AdmissibilityFailure>,
}

/// The smallest prime whose residue classes are fully covered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityFailure {
    pub prime: u64,
    pub residue_count: u64,
}

/// Deduplicated positive pairwise differences, each with one witnessing
/// index pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSet {
    values: Vec<u64>,
    source_pairs: Vec<(usize, usize)>,
}

impl DifferenceSet {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Witness (i, j) for `values[idx]`, smallest i then smallest j.
    pub fn source_pairs(&self) -> &[(usize, usize)] {
        &self.source_pairs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Number of distinct residue classes mod `p` occupied by the tuple.
pub fn residue_count(h: &Tuple, p: u64) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::precondition(format!("{p} is not prime")));
    }
    let mut seen = std::collections::HashSet::new();
    for &e in h.elements() {
        seen.insert(e % p);
        if seen.len() as u64 == p {
            break;
        }
    }
    Ok(seen.len() as u64)
}

/// Reusable residue mark table, cleared by bumping an epoch instead of
/// re-zeroing; the admissibility checker hits it once per prime.
struct ResidueMarker {
    stamp: Vec<u32>,
    epoch: u32,
}

impl ResidueMarker {
    fn new(max_modulus: usize) -> Self {
        ResidueMarker {
            stamp: vec![0; max_modulus],
            epoch: 0,
        }
    }

    /// Distinct residues of `elements` mod `p`, stopping early once all
    /// `p` classes are covered. `p` must be <= the table size.
    fn count(&mut self, elements: &[u64], p: u64) -> u64 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let mut count = 0u64;
        for &e in elements {
            let r = (e % p) as usize;
            if self.stamp[r] != self.epoch {
                self.stamp[r] = self.epoch;
                count += 1;
                if count == p {
                    break;
                }
            }
        }
        count
    }
}

/// Decide admissibility: `nu_p(H) < p` for every prime `p`.
///
/// Only primes `p <= k` are examined: for `p > k` the k elements occupy at
/// most k < p classes, so those primes can never fail. The first failing
/// prime (if any) is reported with its residue count.
pub fn is_admissible(h: &Tuple) -> AdmissibilityReport {
    let k = h.len() as u64;
    let mut marker = ResidueMarker::new(k as usize + 1);
    let mut checked = 0u64;
    let mut failure = None;
    for_primes_in_range(2, k + 1, |p| {
        if failure.is_some() {
            return;
        }
        checked = p;
        let nu = marker.count(h.elements(), p);
        if nu >= p {
            failure = Some(AdmissibilityFailure {
                prime: p,
                residue_count: nu,
            });
        }
    });
    AdmissibilityReport {
        admissible: failure.is_none(),
        checked_prime_bound: checked,
        failure,
    }
}

/// The deduplicated set `{h_j - h_i : i < j}` with witnesses.
pub fn diff_set(h: &Tuple) -> Result<DifferenceSet> {
    scaled_diff_set(h, 1)
}

/// `diff_set` with every value multiplied by `m >= 1`.
pub fn scaled_diff_set(h: &Tuple, m: u64) -> Result<DifferenceSet> {
    if h.len() < 2 {
        return Err(Error::precondition(
            "difference set needs k >= 2 (no pairs otherwise)",
        ));
    }
    if m == 0 {
        return Err(Error::precondition("multiplier m must be >= 1"));
    }
    let elems = h.elements();
    let mut map: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let d = (elems[j] - elems[i])
                .checked_mul(m)
                .ok_or_else(|| Error::resource("scaled difference overflows u64"))?;
            map.entry(d).or_insert((i, j));
        }
    }
    let (values, source_pairs) = map.into_iter().unzip();
    Ok(DifferenceSet {
        values,
        source_pairs,
    })
}

/// `{b + q*h_1, ..., b + q*h_k}`. Admissibility carries over from `h`
/// (checked by callers that care, not assumed here).
pub fn translate_scale(h: &Tuple, b: u64, q: u64) -> Result<Tuple> {
    if q == 0 {
        return Err(Error::precondition("scale q must be >= 1"));
    }
    let mapped = h
        .elements()
        .iter()
        .map(|&e| {
            let v = b as u128 + q as u128 * e as u128;
            u64::try_from(v).map_err(|_| Error::resource("translated element overflows u64"))
        })
        .collect::<Result<Vec<u64>>>()?;
    Tuple::new(mapped)
}

/// The first `k` primes strictly greater than `k`, shifted so the least
/// element is 0. Every prime p <= k misses the 0 class before the shift,
/// so the result is admissible; the checker confirms rather than assumes.
pub fn gen_tuple_primes_past_k(k: u64) -> Result<Tuple> {
    if k == 0 {
        return Err(Error::precondition("k must be >= 1"));
    }
    if k > 50_000_000 {
        return Err(Error::resource(format!("generator capped below k = {k}")));
    }
    let mut primes: Vec<u64> = Vec::with_capacity(k as usize);
    let mut bound = upper_bound_for_primes_past(k);
    loop {
        primes.clear();
        for_primes_in_range(k + 1, bound, |p| {
            if primes.len() < k as usize {
                primes.push(p);
            }
        });
        if primes.len() == k as usize {
            break;
        }
        bound = bound.saturating_mul(2);
    }
    let least = primes[0];
    let tuple = Tuple::new(primes.into_iter().map(|p| p - least).collect())?;
    let report = is_admissible(&tuple);
    assert!(
        report.admissible,
        "primes-past-k tuple failed the admissibility check at p = {:?}",
        report.failure
    );
    Ok(tuple)
}

/// Overestimate of where the 2k-th prime lives, so one sieve pass usually
/// suffices to find k primes past k.
fn upper_bound_for_primes_past(k: u64) -> u64 {
    let n = (2 * k).max(6) as f64;
    let est = n * (n.ln() + n.ln().ln());
    (est as u64).max(k + 64) + 64
}

/// Truncated log-space singular series:
///
/// sum over primes p <= p_bound of
///   [p does not divide q]  ln(1 - nu_p(H)/p)   +   k ln(1/(1 - 1/p)),
///
/// accumulated term by term with compensated summation; partial products
/// are never exponentiated, since (1 - 1/2)^(-k) overflows f64 long before
/// the tuple sizes of interest.
pub fn singular_series_log(h: &Tuple, q: u64, p_bound: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::precondition("q must be >= 1"));
    }
    if p_bound < 2 {
        return Err(Error::precondition("truncation bound must be >= 2"));
    }
    // The tail already sits below 1e-9 at P = 10^9; enumerating primes
    // past 10^10 buys nothing but a very long wait.
    if p_bound > 10_000_000_000 {
        return Err(Error::resource(format!(
            "truncation bound capped at 10^10, got {p_bound}"
        )));
    }
    let report = is_admissible(h);
    if let Some(f) = report.failure {
        return Err(Error::precondition(format!(
            "tuple is inadmissible (nu_{}(H) = {}); a factor vanishes and its log is undefined",
            f.prime, f.residue_count
        )));
    }
    let k = h.len() as u64;
    let diameter = h.diameter();
    // Residue counting is only informative for p <= diameter: past that,
    // no difference can vanish mod p, so nu_p = k exactly.
    let mut marker = ResidueMarker::new((diameter.min(p_bound) + 1).min(1 << 26) as usize);
    let use_sets = diameter.min(p_bound) + 1 > 1 << 26;

    let mut nu_sum = KahanSum::default();
    let mut base_sum = KahanSum::default();
    for_primes_in_range(2, p_bound.saturating_add(1), |p| {
        if !q.is_multiple_of(p) {
            let nu = if p > diameter {
                k
            } else if use_sets {
                let mut seen = std::collections::HashSet::new();
                for &e in h.elements() {
                    seen.insert(e % p);
                }
                seen.len() as u64
            } else {
                marker.count(h.elements(), p)
            };
            nu_sum.add((-(nu as f64) / p as f64).ln_1p());
        }
        base_sum.add((-1.0 / p as f64).ln_1p());
    });
    Ok(nu_sum.total() - k as f64 * base_sum.total())
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
