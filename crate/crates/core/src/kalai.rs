//! Kalai's sampler: uniformly random integers in [1, N] together with
//! their prime factorization.
//!
//! One round draws a non-increasing chain N ≥ s_1 ≥ s_2 ≥ ... that stops at
//! its first 1 (each next value uniform on [1, previous]), multiplies the
//! prime chain values into r, and accepts r with probability r/N if r ≤ N.
//! Accepted outputs are exactly uniform; a round succeeds with probability
//! Π_{p ≤ N}(1 − 1/p), so the expected number of rounds is O(log N) and the
//! expected number of primality tests O(log² N).

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, is_probable_prime};
use crate::factored::FactoredInteger;
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Random bases used by Miller–Rabin above its deterministic range.
const MR_ROUNDS: u32 = 64;

/// Hard cap on rounds per sample; hitting it indicates a broken RNG rather
/// than bad luck (the success probability at desk scales is ≫ 10^-6).
const MAX_ROUNDS: u64 = 10_000_000;

#[derive(Debug, Clone, Default)]
pub struct KalaiStats {
    pub rounds: u64,
    pub primality_tests: u64,
    /// Chain length of each round, terminal 1 included.
    pub list_lengths: Vec<u64>,
}

/// One rejection round. Returns the accepted candidate (if any) and the
/// number of primality tests spent.
pub fn kalai_round(
    n: &BigUint,
    rng: &mut RandomSource,
) -> Result<(Option<FactoredInteger>, u64, u64)> {
    if n.is_zero() {
        return Err(Error::BadParameter("N must be at least 1".into()));
    }
    match n.to_u64() {
        Some(small) => Ok(kalai_round_u64(small, rng)),
        None => kalai_round_big(n, rng),
    }
}

/// Machine-word path: N and all chain values fit u64.
fn kalai_round_u64(n: u64, rng: &mut RandomSource) -> (Option<FactoredInteger>, u64, u64) {
    let mut tests = 0u64;
    let mut length = 0u64;
    // (value, is_prime) of this round's chain, for the per-round cache:
    // chains repeat values, and a repeat must not re-test
    let mut seen: Vec<(u64, bool)> = Vec::new();
    let mut primes: Vec<u64> = Vec::new();
    let mut r: u128 = 1;
    let mut overflow = false;
    let mut s = n;
    loop {
        s = 1 + rng.uniform_below_u64(s);
        length += 1;
        if s == 1 {
            break;
        }
        let prime = match seen.iter().find(|&&(v, _)| v == s) {
            Some(&(_, p)) => p,
            None => {
                tests += 1;
                let p = is_prime_u64(s);
                seen.push((s, p));
                p
            }
        };
        if prime {
            primes.push(s);
            r = r.saturating_mul(s as u128);
            if r > n as u128 {
                overflow = true;
            }
        }
    }
    if overflow {
        return (None, tests, length);
    }
    let r = r as u64;
    if !rng.bernoulli_exact_u64(r, n) {
        return (None, tests, length);
    }
    primes.sort_unstable();
    let mut out = FactoredInteger::one();
    let mut i = 0;
    while i < primes.len() {
        let p = primes[i];
        let mut e = 0u32;
        while i < primes.len() && primes[i] == p {
            e += 1;
            i += 1;
        }
        out.push_prime(&BigUint::from(p), e);
    }
    (Some(out), tests, length)
}

/// Arbitrary-precision path, drawing the same stream as the u64 path would.
fn kalai_round_big(
    n: &BigUint,
    rng: &mut RandomSource,
) -> Result<(Option<FactoredInteger>, u64, u64)> {
    let one = BigUint::one();
    let mut tests = 0u64;
    let mut length = 0u64;
    let mut seen: Vec<(BigUint, bool)> = Vec::new();
    let mut primes: Vec<BigUint> = Vec::new();
    let mut r = BigUint::one();
    let mut overflow = false;
    let mut s = n.clone();
    loop {
        s = rng.uniform_below(&s)? + &one;
        length += 1;
        if s.is_one() {
            break;
        }
        let prime = match seen.iter().find(|(v, _)| *v == s) {
            Some(&(_, p)) => p,
            None => {
                tests += 1;
                let p = is_probable_prime(&s, MR_ROUNDS, rng);
                seen.push((s.clone(), p));
                p
            }
        };
        if prime {
            if !overflow {
                r *= &s;
                if r > *n {
                    overflow = true;
                }
            }
            primes.push(s.clone());
        }
    }
    if overflow {
        return Ok((None, tests, length));
    }
    let accept = rng.bernoulli_exact(&BigRational::new(
        r.clone().into(),
        n.clone().into(),
    ))?;
    if !accept {
        return Ok((None, tests, length));
    }
    primes.sort_unstable();
    let mut out = FactoredInteger::one();
    let mut i = 0;
    while i < primes.len() {
        let p = primes[i].clone();
        let mut e = 0u32;
        while i < primes.len() && primes[i] == p {
            e += 1;
            i += 1;
        }
        out.push_prime(&p, e);
    }
    Ok((Some(out), tests, length))
}

/// Repeat rounds until acceptance: a uniform factored integer in [1, N].
pub fn sample_uniform_factored(
    n: &BigUint,
    rng: &mut RandomSource,
) -> Result<(FactoredInteger, KalaiStats)> {
    let mut stats = KalaiStats::default();
    loop {
        let (candidate, tests, length) = kalai_round(n, rng)?;
        stats.rounds += 1;
        stats.primality_tests += tests;
        stats.list_lengths.push(length);
        if let Some(c) = candidate {
            return Ok((c, stats));
        }
        if stats.rounds >= MAX_ROUNDS {
            return Err(Error::SamplerStalled(stats.rounds));
        }
    }
}
