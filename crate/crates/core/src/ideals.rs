//! Counting and enumerating ideals by norm.
//!
//! For a prime p with splitting (e_i, f_i), the ideals of norm p^e
//! correspond to exponent tuples (c_1..c_m) with Σ c_i f_i = e. The counts
//! D(p^e) come from a suffix DP table that also supports lexicographic
//! unranking, and D(r) is the product over the prime powers of r.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::factored::FactoredInteger;
use crate::number_field::{split_prime, NumberField, PrimeSplitting};
use crate::poly::{Poly, PrimeField};
use crate::rng::RandomSource;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealFactorEntry {
    pub p: BigUint,
    pub generator: Poly<PrimeField>,
    pub e_ram: u32,
    pub f_res: u32,
    /// Exponent of this prime ideal in the factorization, ≥ 1.
    pub exponent: u32,
}

/// An ideal in fully factored form. The norm is Π p^(Σ c·f_res) over the
/// entries; the unit ideal has no entries and norm 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealFactorization {
    pub field_label: String,
    /// Grouped by p ascending, then by generator in canonical order.
    pub entries: Vec<IdealFactorEntry>,
    pub norm: FactoredInteger,
}

impl IdealFactorization {
    pub fn unit(field: &NumberField) -> Self {
        IdealFactorization {
            field_label: field.label().to_string(),
            entries: Vec::new(),
            norm: FactoredInteger::one(),
        }
    }
}

/// Suffix-DP table over the residue degrees of one splitting:
/// `suffix[j][s]` counts tuples (c_j..c_m) with Σ c_i f_i = s. Row m is the
/// empty suffix. Counting and lexicographic unranking both read this table.
#[derive(Debug, Clone)]
pub struct SolutionTable {
    f_res: Vec<u32>,
    target: u32,
    suffix: Vec<Vec<BigUint>>,
}

impl SolutionTable {
    pub fn build(split: &PrimeSplitting, e: u32) -> Self {
        let f_res: Vec<u32> = split.primes_above.iter().map(|q| q.f).collect();
        Self::build_from_degrees(f_res, e)
    }

    pub(crate) fn build_from_degrees(f_res: Vec<u32>, e: u32) -> Self {
        let m = f_res.len();
        let width = e as usize + 1;
        let mut suffix = vec![vec![BigUint::zero(); width]; m + 1];
        suffix[m][0] = BigUint::one();
        for j in (0..m).rev() {
            let f = f_res[j] as usize;
            for s in 0..width {
                let mut acc = BigUint::zero();
                let mut used = 0usize;
                while used <= s {
                    acc += &suffix[j + 1][s - used];
                    used += f;
                }
                suffix[j][s] = acc;
            }
        }
        SolutionTable {
            f_res,
            target: e,
            suffix,
        }
    }

    /// D(p^target): tuples over the whole splitting.
    pub fn count(&self) -> &BigUint {
        &self.suffix[0][self.target as usize]
    }

    /// The `index`-th exponent tuple in lexicographic order on (c_1, c_2, …).
    pub fn unrank(&self, index: &BigUint) -> Result<Vec<u32>> {
        if index >= self.count() {
            return Err(Error::RankOutOfRange {
                rank: index.to_string(),
                count: self.count().to_string(),
            });
        }
        let mut index = index.clone();
        let mut rem = self.target as usize;
        let mut out = Vec::with_capacity(self.f_res.len());
        for (j, &f) in self.f_res.iter().enumerate() {
            let f = f as usize;
            let mut c = 0u32;
            loop {
                let sub = &self.suffix[j + 1][rem - c as usize * f];
                if index < *sub {
                    break;
                }
                index -= sub;
                c += 1;
                debug_assert!(c as usize * f <= rem);
            }
            rem -= c as usize * f;
            out.push(c);
        }
        debug_assert_eq!(rem, 0);
        Ok(out)
    }
}

/// D(p^e) for one splitting.
pub fn count_prime_power(split: &PrimeSplitting, e: u32) -> BigUint {
    SolutionTable::build(split, e).count().clone()
}

/// D(r): the number of ideals of norm exactly r. Multiplicative over the
/// prime powers of r.
pub fn count_norm(
    field: &NumberField,
    r: &FactoredInteger,
    rng: &mut RandomSource,
) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (p, e) in r.factors() {
        let split = split_prime(field, p, rng)?;
        acc *= count_prime_power(&split, *e);
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Every ideal of norm ≤ bound, exactly once, unit ideal included.
/// Deterministic order: depth-first over prime ideals sorted by norm.
pub fn enumerate_ideals(
    field: &NumberField,
    bound: &BigUint,
    rng: &mut RandomSource,
) -> Result<Vec<IdealFactorization>> {
    if bound.is_zero() {
        return Err(Error::BadParameter("bound must be at least 1".into()));
    }
    // collect prime ideals of norm p^f ≤ bound
    struct PrimeIdeal {
        p: BigUint,
        generator: Poly<PrimeField>,
        e_ram: u32,
        f_res: u32,
        norm: BigUint,
    }
    let mut atoms: Vec<PrimeIdeal> = Vec::new();
    let limit = bound.to_u64().unwrap_or(u64::MAX);
    for p in 2..=limit {
        if !crate::arith::is_prime_u64(p) {
            continue;
        }
        let pb = BigUint::from(p);
        let split = split_prime(field, &pb, rng)?;
        for q in &split.primes_above {
            let norm = pb.pow(q.f);
            if norm <= *bound {
                atoms.push(PrimeIdeal {
                    p: pb.clone(),
                    generator: q.generator.clone(),
                    e_ram: q.e,
                    f_res: q.f,
                    norm,
                });
            }
        }
    }
    atoms.sort_by(|a, b| a.norm.cmp(&b.norm).then(a.p.cmp(&b.p)));

    let mut out = Vec::new();
    let mut stack: Vec<(usize, u32)> = Vec::new();
    fn rec(
        atoms: &[/* sorted by norm */ PrimeIdeal],
        field: &NumberField,
        bound: &BigUint,
        min_idx: usize,
        norm: BigUint,
        stack: &mut Vec<(usize, u32)>,
        out: &mut Vec<IdealFactorization>,
    ) {
        let mut entries: Vec<IdealFactorEntry> = stack
            .iter()
            .map(|&(i, c)| IdealFactorEntry {
                p: atoms[i].p.clone(),
                generator: atoms[i].generator.clone(),
                e_ram: atoms[i].e_ram,
                f_res: atoms[i].f_res,
                exponent: c,
            })
            .collect();
        entries.sort_by(|a, b| {
            a.p.cmp(&b.p)
                .then_with(|| a.generator.cmp_canonical(&b.generator))
        });
        let mut norm_fact = FactoredInteger::one();
        for e in &entries {
            norm_fact.push_prime(&e.p, e.exponent * e.f_res);
        }
        debug_assert_eq!(norm_fact.value(), &norm);
        out.push(IdealFactorization {
            field_label: field.label().to_string(),
            entries,
            norm: norm_fact,
        });

        for i in min_idx..atoms.len() {
            let mut next = &norm * &atoms[i].norm;
            if next > *bound {
                break; // atoms sorted by norm: nothing later fits either
            }
            let mut c = 1u32;
            while next <= *bound {
                stack.push((i, c));
                rec(atoms, field, bound, i + 1, next.clone(), stack, out);
                stack.pop();
                next *= &atoms[i].norm;
                c += 1;
            }
        }
    }
    rec(
        &atoms,
        field,
        bound,
        0,
        BigUint::one(),
        &mut stack,
        &mut out,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::make_field;
    use num_bigint::BigInt;

    fn gaussian() -> NumberField {
        make_field(
            "Q(i)",
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(1)],
            vec![],
            false,
        )
        .unwrap()
    }

    fn rng() -> RandomSource {
        RandomSource::from_seed(0x1DEA)
    }

    fn artificial_split(p: u32, gens: &[&[u32]], es: &[u32]) -> PrimeSplitting {
        use crate::number_field::{PrimeIdealFactor, SplitSource};
        let fp = PrimeField::new(BigUint::from(p));
        let primes_above = gens
            .iter()
            .zip(es)
            .map(|(g, &e)| {
                let gen = Poly::from_coeffs(
                    fp.clone(),
                    g.iter().map(|&c| BigUint::from(c)).collect::<Vec<_>>(),
                );
                let f = gen.degree().unwrap() as u32;
                PrimeIdealFactor { generator: gen, e, f }
            })
            .collect();
        PrimeSplitting {
            p: BigUint::from(p),
            primes_above,
            source: SplitSource::Computed,
        }
    }

    #[test]
    fn prime_power_counts() {
        let field = gaussian();
        let mut r = rng();
        let s5 = split_prime(&field, &BigUint::from(5u32), &mut r).unwrap();
        assert_eq!(count_prime_power(&s5, 2), BigUint::from(3u32));
        let s3 = split_prime(&field, &BigUint::from(3u32), &mut r).unwrap();
        assert_eq!(count_prime_power(&s3, 1), BigUint::zero());
        assert_eq!(count_prime_power(&s3, 0), BigUint::one());

        // f = (1,1,2), e = 2: (2,0,0),(1,1,0),(0,2,0),(0,0,1)
        let s = artificial_split(7, &[&[1, 1], &[2, 1], &[1, 0, 1]], &[1, 1, 1]);
        assert_eq!(count_prime_power(&s, 2), BigUint::from(4u32));
    }

    #[test]
    fn norm_counts() {
        let field = gaussian();
        let mut r = rng();
        let one = FactoredInteger::one();
        assert_eq!(count_norm(&field, &one, &mut r).unwrap(), BigUint::one());

        let r65 = FactoredInteger::from_prime_powers([
            (BigUint::from(5u32), 1),
            (BigUint::from(13u32), 1),
        ]);
        assert_eq!(
            count_norm(&field, &r65, &mut r).unwrap(),
            BigUint::from(4u32)
        );

        let r3 = FactoredInteger::from_prime_powers([(BigUint::from(3u32), 1)]);
        assert_eq!(count_norm(&field, &r3, &mut r).unwrap(), BigUint::zero());
    }

    #[test]
    fn unranking_is_lexicographic() {
        let s = artificial_split(7, &[&[1, 1], &[2, 1]], &[1, 1]);
        let t = SolutionTable::build(&s, 2);
        assert_eq!(t.count(), &BigUint::from(3u32));
        assert_eq!(t.unrank(&BigUint::from(0u32)).unwrap(), vec![0, 2]);
        assert_eq!(t.unrank(&BigUint::from(1u32)).unwrap(), vec![1, 1]);
        assert_eq!(t.unrank(&BigUint::from(2u32)).unwrap(), vec![2, 0]);
        assert!(t.unrank(&BigUint::from(3u32)).is_err());

        // e = 0: the all-zero tuple
        let t0 = SolutionTable::build(&s, 0);
        assert_eq!(t0.unrank(&BigUint::zero()).unwrap(), vec![0, 0]);

        // f = (1,1,2), e = 2: all four distinct and valid
        let s = artificial_split(7, &[&[1, 1], &[2, 1], &[1, 0, 1]], &[1, 1, 1]);
        let t = SolutionTable::build(&s, 2);
        let mut seen = Vec::new();
        for i in 0u32..4 {
            let tup = t.unrank(&BigUint::from(i)).unwrap();
            assert_eq!(tup[0] + tup[1] + 2 * tup[2], 2);
            assert!(!seen.contains(&tup));
            seen.push(tup);
        }
    }

    #[test]
    fn enumerate_small_gaussian() {
        let field = gaussian();
        let mut r = rng();
        let ideals = enumerate_ideals(&field, &BigUint::from(5u32), &mut r).unwrap();
        let mut norms: Vec<u64> = ideals
            .iter()
            .map(|i| i.norm.value().to_u64().unwrap())
            .collect();
        norms.sort_unstable();
        assert_eq!(norms, vec![1, 2, 4, 5, 5]);

        let unit = enumerate_ideals(&field, &BigUint::one(), &mut r).unwrap();
        assert_eq!(unit.len(), 1);
        assert!(unit[0].entries.is_empty());
    }

    #[test]
    fn enumeration_count_matches_norm_sums() {
        let field = gaussian();
        let mut r = rng();
        let ideals = enumerate_ideals(&field, &BigUint::from(100u32), &mut r).unwrap();
        let mut total = BigUint::zero();
        for n in 1u32..=100 {
            let f = crate::factored::factor_integer(&BigUint::from(n)).unwrap();
            total += count_norm(&field, &f, &mut r).unwrap();
        }
        assert_eq!(BigUint::from(ideals.len()), total);
        // all norms distinct ideals: no duplicates
        let mut keys: Vec<String> = ideals.iter().map(|i| format!("{:?}", i.entries)).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), ideals.len());
    }
}
