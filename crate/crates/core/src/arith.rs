//! Primality testing and small exact combinatorics.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

use crate::rng::RandomSource;
use crate::{Error, Result};

/// Below this bound the fixed witness set {2,3,...,37} is a deterministic
/// primality test (Sorenson–Webster); above it we fall back to random bases.
fn deterministic_mr_bound() -> &'static BigUint {
    static BOUND: OnceLock<BigUint> = OnceLock::new();
    BOUND.get_or_init(|| "3317044064679887385961981".parse().unwrap())
}

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u64; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Miller–Rabin with trial division in front. Deterministic below
/// `deterministic_mr_bound()`; otherwise `rounds` random bases, each missing
/// a composite with probability at most 1/4.
pub fn is_probable_prime(n: &BigUint, rounds: u32, rng: &mut RandomSource) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return false; // n > u64::MAX, so n != p
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    let strong_probable = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };
    if *n < *deterministic_mr_bound() {
        MR_WITNESSES
            .iter()
            .all(|&a| strong_probable(&BigUint::from(a)))
    } else {
        let span = n - 3u32; // bases drawn uniformly from [2, n-2]
        (0..rounds.max(1)).all(|_| {
            let a = rng.uniform_below(&span).unwrap() + 2u32;
            strong_probable(&a)
        })
    }
}

/// Deterministic primality for machine words: trial division by the small
/// primes, then Miller–Rabin with a witness set sized to the input
/// (Pomerance–Selfridge–Wagstaff / Jaeschke bounds).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let witnesses: &[u64] = if n < 1_373_653 {
        &[2, 3]
    } else if n < 3_215_031_751 {
        &[2, 3, 5, 7]
    } else if n < 3_474_749_660_383 {
        &[2, 3, 5, 7, 11, 13]
    } else if n < 341_550_071_728_321 {
        &[2, 3, 5, 7, 11, 13, 17]
    } else if n < 3_825_123_056_546_413_051 {
        &[2, 3, 5, 7, 11, 13, 17, 19, 23]
    } else {
        &MR_WITNESSES
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in witnesses {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact binomial coefficient.
pub fn binomial_coeff(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::BinomialRange { n, k });
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    Ok(acc)
}
