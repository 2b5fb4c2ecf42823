//! Factorization of univariate polynomials over finite fields:
//! squarefree decomposition, then distinct-degree splitting, then
//! Cantor–Zassenhaus equal-degree splitting. Deterministic per seed; the
//! equal-degree stage retries at most 64·deg times before giving up.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::poly::{Field, Poly, PrimeField, ResidueField};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Squarefree decomposition of a monic `f`: pairwise-coprime squarefree
/// parts with their multiplicities (Yun's algorithm with the char-p
/// p-th-power descent).
pub fn squarefree_decomposition<F: Field>(f: &Poly<F>) -> Vec<(Poly<F>, usize)> {
    debug_assert!(f.is_monic());
    let p = f
        .field()
        .characteristic()
        .to_usize()
        .expect("characteristic fits usize");
    let mut out = Vec::new();
    let deriv = f.derivative();
    let mut c = f.gcd(&deriv);
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1usize;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i));
        }
        c = c.div_exact(&y).expect("gcd divides");
        w = y;
        i += 1;
    }
    if !c.is_one() {
        // c is a p-th power: descend on its p-th root
        let root = c.pth_root_poly();
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree decomposition of a monic squarefree `f`: products of the
/// irreducible factors of each degree, paired with that degree.
pub fn distinct_degree<F: Field>(f: &Poly<F>) -> Result<Vec<(Poly<F>, usize)>> {
    debug_assert!(f.is_monic());
    let q = f.field().order();
    let x = Poly::x(f.field().clone());
    let mut f = f.clone();
    let mut h = x.rem(&f)?;
    let mut out = Vec::new();
    let mut d = 0usize;
    while f.degree().is_some_and(|n| n >= 1) {
        d += 1;
        let n = f.degree().unwrap();
        if 2 * d > n {
            out.push((f.clone(), n));
            break;
        }
        h = h.powmod(&q, &f)?;
        let g = h.sub(&x).gcd(&f);
        if g.degree().is_some_and(|m| m >= 1) {
            f = f.div_exact(&g)?;
            h = h.rem(&f)?;
            out.push((g, d));
        }
    }
    Ok(out)
}

/// Split a monic squarefree `f`, all of whose irreducible factors have
/// degree `d`, into those factors (Cantor–Zassenhaus; the char-2 case uses
/// the absolute trace map).
pub fn equal_degree_split<F: Field>(
    f: &Poly<F>,
    d: usize,
    rng: &mut RandomSource,
) -> Result<Vec<Poly<F>>> {
    let n = f.degree().expect("nonzero");
    debug_assert!(n % d == 0);
    if n == d {
        return Ok(vec![f.clone()]);
    }
    let field = f.field().clone();
    let q = field.order();
    let two = BigUint::from(2u32);
    let char_two = field.characteristic() == two;
    let max_attempts = 64 * n;
    for _ in 0..max_attempts {
        let a = Poly::random_below_degree(field.clone(), n, rng);
        if a.degree().is_none() {
            continue;
        }
        let g = a.gcd(f);
        if let Some(m) = g.degree() {
            if m >= 1 && m < n {
                return recombine(&g, f, d, rng);
            }
        }
        let b = if char_two {
            // absolute trace: a + a^2 + a^4 + ... over F_{2^(k d)}
            let bits = (q.bits() - 1) as usize * d;
            let mut acc = a.rem(f)?;
            let mut t = acc.clone();
            for _ in 1..bits {
                t = t.mul(&t).rem(f)?;
                acc = acc.add(&t);
            }
            acc
        } else {
            let exp = (q.pow(d as u32) - 1u32) / &two;
            a.powmod(&exp, f)?
        };
        let g = b.sub(&Poly::one(field.clone())).gcd(f);
        if let Some(m) = g.degree() {
            if m >= 1 && m < n {
                return recombine(&g, f, d, rng);
            }
        }
    }
    Err(Error::SplittingStalled(max_attempts))
}

fn recombine<F: Field>(
    g: &Poly<F>,
    f: &Poly<F>,
    d: usize,
    rng: &mut RandomSource,
) -> Result<Vec<Poly<F>>> {
    let rest = f.div_exact(g)?;
    let mut out = equal_degree_split(g, d, rng)?;
    out.extend(equal_degree_split(&rest, d, rng)?);
    Ok(out)
}

/// Full factorization into monic irreducibles with multiplicities, sorted
/// canonically. The product of the factors reproduces `f` up to its leading
/// coefficient.
pub fn factor_poly<F: Field>(
    f: &Poly<F>,
    rng: &mut RandomSource,
) -> Result<Vec<(Poly<F>, usize)>> {
    if f.degree().map_or(true, |n| n < 1) {
        return Err(Error::NothingToFactor);
    }
    let monic = f.monic();
    let mut out = Vec::new();
    for (blob, mult) in squarefree_decomposition(&monic) {
        for (slice, d) in distinct_degree(&blob)? {
            for irr in equal_degree_split(&slice, d, rng)? {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp_canonical(&b.0));
    Ok(out)
}

/// Deterministic irreducibility (Rabin): `x^(q^n) ≡ x (mod f)` and
/// `gcd(x^(q^(n/t)) − x, f) = 1` for every prime `t | n`. Constants are not
/// irreducible; the leading coefficient is irrelevant.
pub fn is_irreducible<F: Field>(f: &Poly<F>) -> bool {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let f = f.monic();
    let q = f.field().order();
    let x = Poly::x(f.field().clone());
    let checkpoints: Vec<usize> = prime_divisors(n).into_iter().map(|t| n / t).collect();
    let mut h = x.rem(&f).expect("nonzero modulus");
    for j in 1..=n {
        h = h.powmod(&q, &f).expect("nonzero modulus");
        if checkpoints.contains(&j) {
            let g = h.sub(&x).gcd(&f);
            if g.degree() != Some(0) {
                return false;
            }
        }
    }
    h == x.rem(&f).expect("nonzero modulus")
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Factor a polynomial in an outer variable whose coefficients are given as
/// polynomials over F_p, over the residue field F_p[t]/(π).
pub fn factor_over_residue_field(
    outer_coeffs: &[Poly<PrimeField>],
    pi: &Poly<PrimeField>,
    rng: &mut RandomSource,
) -> Result<Vec<(Poly<ResidueField>, usize)>> {
    if !is_irreducible(pi) {
        return Err(Error::ReducibleModulus(pi.render("t", |c| c.to_string())));
    }
    let k = ResidueField::new(pi.clone());
    let coeffs: Vec<_> = outer_coeffs.iter().map(|c| k.embed(c)).collect();
    let f = Poly::from_coeffs(k, coeffs);
    factor_poly(&f, rng)
}
