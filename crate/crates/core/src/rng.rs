//! Deterministic randomness with exact range uniformity.
//!
//! All sampling in this crate reduces to `uniform_below`: rejection on bit
//! blocks, so every value in `[0, bound)` is exactly equally likely and the
//! consumed stream depends only on the seed and the sequence of bounds.
//! The `u64` and big-integer entry points draw identical streams for equal
//! bounds, which lets hot loops switch to machine words without changing
//! any sampled output.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

pub struct RandomSource {
    rng: ChaCha12Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, bound)` for `bound >= 1`. Draws nothing when
    /// `bound == 1`.
    #[inline]
    pub fn uniform_below_u64(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        if bound == 1 {
            return 0;
        }
        let bits = 64 - (bound - 1).leading_zeros();
        let mask = if bits == 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        };
        loop {
            let v = self.rng.next_u64() & mask;
            if v < bound {
                return v;
            }
        }
    }

    /// Uniform on `[0, bound)`; errors on an empty range.
    pub fn uniform_below(&mut self, bound: &BigUint) -> Result<BigUint> {
        if bound.is_zero() {
            return Err(Error::EmptyRange);
        }
        if let Some(b) = bound.to_u64() {
            return Ok(BigUint::from(self.uniform_below_u64(b)));
        }
        let bits = (bound - 1u32).bits();
        let blocks = bits.div_ceil(64) as usize;
        let top_bits = bits % 64;
        let top_mask = if top_bits == 0 {
            u64::MAX
        } else {
            (1u64 << top_bits) - 1
        };
        let mut words = vec![0u64; blocks];
        loop {
            for w in words.iter_mut() {
                *w = self.rng.next_u64();
            }
            words[blocks - 1] &= top_mask;
            let v = biguint_from_u64_words(&words);
            if v < *bound {
                return Ok(v);
            }
        }
    }

    /// True with probability exactly `prob`: draw `u` uniform below the
    /// (reduced) denominator and compare against the numerator.
    pub fn bernoulli_exact(&mut self, prob: &BigRational) -> Result<bool> {
        if prob.is_negative() || *prob > BigRational::one() {
            return Err(Error::NotAProbability(prob.to_string()));
        }
        let num = prob.numer().magnitude();
        let den = prob.denom().magnitude();
        let u = self.uniform_below(den)?;
        Ok(u < *num)
    }

    /// `bernoulli_exact` for machine-word fractions. Reduces `num/den`
    /// first so that the stream matches the big-rational entry point.
    #[inline]
    pub fn bernoulli_exact_u64(&mut self, num: u64, den: u64) -> bool {
        debug_assert!(den > 0 && num <= den);
        let g = gcd_u64(num, den);
        self.uniform_below_u64(den / g) < num / g
    }

    /// Like `bernoulli_exact_u64` but for double-word fractions; falls back
    /// to the big-integer draw (same stream) when the reduced denominator
    /// does not fit a machine word.
    pub fn bernoulli_exact_u128(&mut self, num: u128, den: u128) -> bool {
        debug_assert!(den > 0 && num <= den);
        let g = gcd_u128(num, den);
        let (num, den) = (num / g, den / g);
        match (u64::try_from(num), u64::try_from(den)) {
            (Ok(n), Ok(d)) => self.bernoulli_exact_u64(n, d),
            _ => {
                let u = self.uniform_below(&BigUint::from(den)).unwrap();
                u < BigUint::from(num)
            }
        }
    }
}

fn biguint_from_u64_words(words: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(words.len() * 8);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

#[inline]
pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn u128_bernoulli_matches_big_rational_stream() {
        let num: u128 = (1 << 70) + 5;
        let den: u128 = (1 << 71) + 11;
        let mut a = RandomSource::from_seed(9);
        let mut b = RandomSource::from_seed(9);
        for _ in 0..200 {
            let x = a.bernoulli_exact_u128(num, den);
            let y = b
                .bernoulli_exact(&BigRational::new(BigInt::from(num), BigInt::from(den)))
                .unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::from_seed(42);
        let mut b = RandomSource::from_seed(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn bound_one_draws_nothing() {
        let mut a = RandomSource::from_seed(7);
        let mut b = RandomSource::from_seed(7);
        for _ in 0..10 {
            assert!(a.uniform_below(&BigUint::one()).unwrap().is_zero());
        }
        // `a` consumed no randomness above
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn range_containment_wide() {
        let mut rng = RandomSource::from_seed(1);
        let bound = BigUint::one() << 70;
        for _ in 0..200 {
            let v = rng.uniform_below(&bound).unwrap();
            assert!(v.bits() <= 70);
            assert!(v < bound);
        }
    }

    #[test]
    fn empty_range_rejected() {
        let mut rng = RandomSource::from_seed(1);
        assert!(matches!(
            rng.uniform_below(&BigUint::zero()),
            Err(Error::EmptyRange)
        ));
    }

    #[test]
    fn u64_and_biguint_paths_share_streams() {
        for bound in [2u64, 3, 6, 100, 1 << 33, u64::MAX] {
            let mut a = RandomSource::from_seed(bound);
            let mut b = RandomSource::from_seed(bound);
            let big = BigUint::from(bound);
            for _ in 0..50 {
                assert_eq!(
                    BigUint::from(a.uniform_below_u64(bound)),
                    b.uniform_below(&big).unwrap()
                );
            }
        }
    }

    #[test]
    fn bernoulli_trivial_cases() {
        let mut rng = RandomSource::from_seed(3);
        let zero = BigRational::zero();
        let one = BigRational::one();
        for _ in 0..20 {
            assert!(!rng.bernoulli_exact(&zero).unwrap());
            assert!(rng.bernoulli_exact(&one).unwrap());
        }
        let bad = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert!(rng.bernoulli_exact(&bad).is_err());
        let neg = BigRational::new(BigInt::from(-1), BigInt::from(2));
        assert!(rng.bernoulli_exact(&neg).is_err());
    }

    #[test]
    fn bernoulli_u64_matches_big() {
        // unreduced 50/100 must follow the same stream as reduced 1/2
        let mut a = RandomSource::from_seed(9);
        let mut b = RandomSource::from_seed(9);
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        for _ in 0..100 {
            assert_eq!(a.bernoulli_exact_u64(50, 100), b.bernoulli_exact(&half).unwrap());
        }
    }
}
