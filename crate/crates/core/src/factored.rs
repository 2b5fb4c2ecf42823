//! Integers carried together with their prime factorization.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

use crate::arith::is_prime_u64;
use crate::{Error, Result};

/// A positive integer with its full prime factorization. Primes are kept
/// strictly increasing; the product of `p^e` always equals `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Assemble from prime powers. Entries may arrive unsorted or with
    /// repeated primes; they get merged. Primality is the caller's
    /// responsibility (samplers certify primes by construction).
    pub fn from_prime_powers(entries: impl IntoIterator<Item = (BigUint, u32)>) -> Self {
        let mut out = FactoredInteger::one();
        for (p, e) in entries {
            out.push_prime(&p, e);
        }
        out
    }

    /// Multiply in `p^e`, keeping the factor list sorted.
    pub fn push_prime(&mut self, p: &BigUint, e: u32) {
        if e == 0 {
            return;
        }
        self.value *= p.pow(e);
        match self.factors.binary_search_by(|(q, _)| q.cmp(p)) {
            Ok(i) => self.factors[i].1 += e,
            Err(i) => self.factors.insert(i, (p.clone(), e)),
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Ω: the number of prime factors counted with multiplicity.
    pub fn omega(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        match self.factors.binary_search_by(|(q, _)| q.cmp(p)) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| {
                if *e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Factor a desk-scale integer: trial division by everything below 10^6,
/// then a primality check on the cofactor. Integers whose second-largest
/// prime factor exceeds 10^6 are out of scope and error out honestly.
pub fn factor_integer(n: &BigUint) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::BadParameter("cannot factor zero".into()));
    }
    let mut out = FactoredInteger::one();
    let mut rest = n.clone();
    let mut d = 2u64;
    while d < 1_000_000 {
        if rest.is_one() {
            return Ok(out);
        }
        // skip ahead using a word-sized remainder when possible
        if let Some(r) = rest.to_u64() {
            if d.saturating_mul(d) > r {
                break;
            }
        }
        if (&rest % d).is_zero() {
            let p = BigUint::from(d);
            let mut e = 0u32;
            while (&rest % d).is_zero() {
                rest /= d;
                e += 1;
            }
            out.push_prime(&p, e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(out);
    }
    let prime = match rest.to_u64() {
        Some(r) => is_prime_u64(r),
        None => {
            let mut rng = crate::rng::RandomSource::from_seed(0);
            crate::arith::is_probable_prime(&rest, 64, &mut rng)
        }
    };
    if prime {
        out.push_prime(&rest, 1);
        Ok(out)
    } else {
        Err(Error::CannotFactor(n.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assembles_and_merges() {
        let f = FactoredInteger::from_prime_powers([
            (BigUint::from(5u32), 1),
            (BigUint::from(2u32), 2),
            (BigUint::from(2u32), 1),
            (BigUint::from(3u32), 2),
        ]);
        assert_eq!(f.value(), &BigUint::from(360u32));
        assert_eq!(
            f.factors(),
            &[
                (BigUint::from(2u32), 3),
                (BigUint::from(3u32), 2),
                (BigUint::from(5u32), 1)
            ]
        );
        assert_eq!(f.omega(), 6);
        assert_eq!(f.to_string(), "2^3 * 3^2 * 5");
    }

    #[test]
    fn factors_desk_scale() {
        let f = factor_integer(&BigUint::from(360u32)).unwrap();
        assert_eq!(f.value(), &BigUint::from(360u32));
        assert_eq!(f.omega(), 6);

        let one = factor_integer(&BigUint::one()).unwrap();
        assert!(one.is_one());

        // 10^12 + 39 is prime (cofactor path)
        let big = BigUint::from(1_000_000_000_039u64);
        let f = factor_integer(&big).unwrap();
        assert_eq!(f.factors().len(), 1);
        assert_eq!(f.exponent_of(&big), 1);

        // product of two 8-digit primes: beyond trial division, must refuse
        let hard = BigUint::from(99_999_989u64) * BigUint::from(99_999_971u64);
        assert!(matches!(factor_integer(&hard), Err(Error::CannotFactor(_))));
    }
}
