//! Property sweeps for prime splitting and ideal counting across the
//! fixture fields: splitting invariants at every small prime,
//! multiplicativity and the d^Ω / binomial bounds for D, unranking
//! bijectivity on real splittings, and the Gaussian count against the
//! sum-of-two-squares character formula.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use idealgen::arith::{binomial_coeff, is_prime_u64};
use idealgen::factored::factor_integer;
use idealgen::ideals::{count_norm, count_prime_power, enumerate_ideals, SolutionTable};
use idealgen::number_field::{make_field, split_prime, NumberField, OverrideSpec, SplitSource};
use idealgen::poly::Poly;
use idealgen::polyfactor::is_irreducible;
use idealgen::rng::RandomSource;

fn field(coeffs: &[i64], label: &str) -> NumberField {
    make_field(
        label,
        coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        vec![],
        false,
    )
    .unwrap()
}

fn all_fields() -> Vec<NumberField> {
    vec![
        field(&[0, 1], "Q"),
        field(&[1, 0, 1], "Q(i)"),
        field(&[5, 0, 1], "Q(sqrt(-5))"),
        field(&[-2, 0, 0, 1], "Q(cbrt(2))"),
        field(&[2, 0, 0, 0, 1], "Q(2^(1/4) i^(1/4))"),
        field(&[-1, -1, 0, 0, 0, 1], "quintic x^5-x-1"),
    ]
}

fn rng(seed: u64) -> RandomSource {
    RandomSource::from_seed(seed)
}

#[test]
fn splitting_invariants_hold_at_every_small_prime() {
    let mut r = rng(41);
    for f in all_fields() {
        let d = f.degree() as u32;
        for p in 2u64..=2000 {
            if !is_prime_u64(p) {
                continue;
            }
            let p_big = BigUint::from(p);
            let split = split_prime(&f, &p_big, &mut r).unwrap();
            let ef: u32 = split.primes_above.iter().map(|q| q.e * q.f).sum();
            assert_eq!(ef, d, "Σ e·f broken for {} at {p}", f.label());

            let mut product = Poly::one(split.primes_above[0].generator.field().clone());
            for q in &split.primes_above {
                assert!(q.generator.is_monic());
                assert_eq!(q.generator.degree(), Some(q.f as usize));
                assert!(is_irreducible(&q.generator), "reducible generator at {p}");
                for _ in 0..q.e {
                    product = product.mul(&q.generator);
                }
                if q.e > 1 {
                    // ramified ⇒ p divides disc(f)
                    assert!(
                        (f.poly_disc() % BigInt::from(p)).is_zero(),
                        "ramified {p} does not divide the discriminant of {}",
                        f.label()
                    );
                }
            }
            assert_eq!(product, f.poly_mod(&p_big), "Π g^e ≠ f̄ at {p}");
            for w in split.primes_above.windows(2) {
                assert_ne!(w[0].generator, w[1].generator);
            }
        }
    }
}

#[test]
fn count_norm_is_multiplicative_on_coprime_pairs() {
    let mut r = rng(42);
    for f in [
        field(&[1, 0, 1], "Q(i)"),
        field(&[5, 0, 1], "Q(sqrt(-5))"),
        field(&[-2, 0, 0, 1], "Q(cbrt(2))"),
    ] {
        for _ in 0..200 {
            let a = 2 + u64::try_from(r.uniform_below(&BigUint::from(4998u32)).unwrap()).unwrap();
            let b = 2 + u64::try_from(r.uniform_below(&BigUint::from(4998u32)).unwrap()).unwrap();
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            let fa = factor_integer(&BigUint::from(a)).unwrap();
            let fb = factor_integer(&BigUint::from(b)).unwrap();
            let fab = factor_integer(&BigUint::from(a * b)).unwrap();
            let da = count_norm(&f, &fa, &mut r).unwrap();
            let db = count_norm(&f, &fb, &mut r).unwrap();
            let dab = count_norm(&f, &fab, &mut r).unwrap();
            assert_eq!(dab, da * db, "D({a}·{b}) ≠ D({a})·D({b}) in {}", f.label());
        }
    }
}

#[test]
fn prime_power_counts_meet_the_binomial_bound() {
    // D(p^e) ≤ binom(d+e−1, e), with equality exactly at totally split p
    let mut r = rng(43);
    for f in all_fields() {
        let d = f.degree() as u64;
        for p in 2u64..=500 {
            if !is_prime_u64(p) {
                continue;
            }
            let split = split_prime(&f, &BigUint::from(p), &mut r).unwrap();
            let totally_split = split.primes_above.len() == f.degree()
                && split.primes_above.iter().all(|q| q.f == 1);
            for e in 1u32..=6 {
                let bound = binomial_coeff(d + e as u64 - 1, e as u64).unwrap();
                let count = count_prime_power(&split, e);
                assert!(count <= bound, "D({p}^{e}) > binomial in {}", f.label());
                assert_eq!(
                    count == bound,
                    totally_split,
                    "binomial bound tightness wrong at {p}^{e} in {}",
                    f.label()
                );
            }
        }
    }
}

#[test]
fn counts_stay_under_d_to_omega() {
    let mut r = rng(44);
    for f in all_fields() {
        let d = f.degree() as u32;
        for _ in 0..1000 {
            let n = 1 + u64::try_from(r.uniform_below(&BigUint::from(999_999u32)).unwrap())
                .unwrap();
            let fact = factor_integer(&BigUint::from(n)).unwrap();
            let omega = u32::try_from(fact.omega()).unwrap();
            let count = count_norm(&f, &fact, &mut r).unwrap();
            assert!(
                count <= BigUint::from(d).pow(omega),
                "D({n}) > {d}^{omega} in {}",
                f.label()
            );
        }
    }
}

#[test]
fn unranking_runs_the_full_bijection_on_real_splittings() {
    let mut r = rng(45);
    let cases = [
        (field(&[-2, 0, 0, 1], "Q(cbrt(2))"), vec![2u64, 3, 5, 29, 31]),
        (field(&[2, 0, 0, 0, 1], "quartic"), vec![2, 3, 5, 73, 89]),
        (field(&[-1, -1, 0, 0, 0, 1], "quintic"), vec![2, 3, 7, 19, 151]),
    ];
    for (f, primes) in cases {
        for p in primes {
            let split = split_prime(&f, &BigUint::from(p), &mut r).unwrap();
            for e in 1u32..=5 {
                let table = SolutionTable::build(&split, e);
                let count = u64::try_from(table.count()).unwrap();
                let mut seen = std::collections::HashSet::new();
                for i in 0..count {
                    let tuple = table.unrank(&BigUint::from(i)).unwrap();
                    assert_eq!(tuple.len(), split.primes_above.len());
                    let total: u32 = tuple
                        .iter()
                        .zip(&split.primes_above)
                        .map(|(c, q)| c * q.f)
                        .sum();
                    assert_eq!(total, e, "tuple off-target at {p}^{e}");
                    assert!(seen.insert(tuple), "duplicate tuple at {p}^{e}");
                }
                assert!(table.unrank(&BigUint::from(count)).is_err());
            }
        }
    }
}

#[test]
fn gaussian_counts_match_the_character_formula() {
    // independent oracle for Z[i]: D(r) = Π over p^a || r of
    //   1 (p = 2), a+1 (p ≡ 1 mod 4), [a even] (p ≡ 3 mod 4)
    let f = field(&[1, 0, 1], "Q(i)");
    let mut r = rng(46);
    for n in 1u64..=3000 {
        let fact = factor_integer(&BigUint::from(n)).unwrap();
        let mut expected = BigUint::one();
        for (p, a) in fact.factors() {
            let pm = u64::try_from(p % BigUint::from(4u32)).unwrap();
            match pm {
                2 => {}
                1 => expected *= BigUint::from(a + 1),
                _ => {
                    if a % 2 == 1 {
                        expected = BigUint::zero();
                    }
                }
            }
        }
        assert_eq!(
            count_norm(&f, &fact, &mut r).unwrap(),
            expected,
            "character formula mismatch at {n}"
        );
    }
}

#[test]
fn override_field_counts_like_its_maximal_order() {
    // x²+3: Z[x]/(x²+3) is not maximal at 2; with the inert-2 override the
    // counts must match the maximal order Z[ω] of Q(√−3)
    let f = make_field(
        "Q(sqrt(-3))",
        vec![BigInt::from(3), BigInt::zero(), BigInt::one()],
        vec![OverrideSpec {
            p: BigUint::from(2u32),
            entries: vec![(1, 2, vec![BigInt::one(), BigInt::one(), BigInt::one()])],
        }],
        false,
    )
    .unwrap();
    let mut r = rng(47);
    let split2 = split_prime(&f, &BigUint::from(2u32), &mut r).unwrap();
    assert_eq!(split2.source, SplitSource::Override);
    assert_eq!(
        (split2.primes_above[0].e, split2.primes_above[0].f),
        (1, 2)
    );

    // D via quadratic reciprocity for disc −3: split ⟺ p ≡ 1 mod 3
    let mut total = BigUint::zero();
    for n in 1u64..=60 {
        let fact = factor_integer(&BigUint::from(n)).unwrap();
        let mut expected = BigUint::one();
        for (p, a) in fact.factors() {
            let pm = u64::try_from(p % BigUint::from(3u32)).unwrap();
            match pm {
                0 => {} // ramified
                1 => expected *= BigUint::from(a + 1),
                _ => {
                    if a % 2 == 1 {
                        expected = BigUint::zero();
                    }
                }
            }
        }
        let got = count_norm(&f, &fact, &mut r).unwrap();
        assert_eq!(got, expected, "Q(√−3) count mismatch at {n}");
        total += got;
    }
    let ideals = enumerate_ideals(&f, &BigUint::from(60u32), &mut r).unwrap();
    assert_eq!(BigUint::from(ideals.len()), total);
}

#[test]
fn enumeration_count_equals_summed_counts() {
    let mut r = rng(48);
    for f in [
        field(&[5, 0, 1], "Q(sqrt(-5))"),
        field(&[-2, 0, 0, 1], "Q(cbrt(2))"),
    ] {
        let bound = 150u64;
        let mut total = BigUint::zero();
        for n in 1..=bound {
            total += count_norm(&f, &factor_integer(&BigUint::from(n)).unwrap(), &mut r).unwrap();
        }
        let ideals = enumerate_ideals(&f, &BigUint::from(bound), &mut r).unwrap();
        assert_eq!(BigUint::from(ideals.len()), total, "{}", f.label());
        // unit ideal exactly once, every norm within the bound
        assert_eq!(ideals.iter().filter(|i| i.norm.is_one()).count(), 1);
        for ideal in &ideals {
            assert!(ideal.norm.value() <= &BigUint::from(bound));
        }
    }
}
