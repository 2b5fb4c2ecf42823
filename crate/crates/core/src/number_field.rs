//! Number field descriptors and the rational-prime splitting oracle.
//!
//! A field is given by a monic irreducible f ∈ ℤ[x]. Splitting a prime p
//! factors f mod p and certifies with the Dedekind index criterion that the
//! shape (e_i, f_i) of the factorization is the true splitting of p in the
//! maximal order. Primes where the criterion fails (index divisors) must be
//! supplied as overrides — there are finitely many per field, all dividing
//! disc(f).

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::arith::{is_prime_u64, is_probable_prime};
use crate::poly::{Poly, PrimeField};
use crate::polyfactor::{factor_poly, is_irreducible};
use crate::rng::RandomSource;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeIdealFactor {
    /// Monic irreducible generator of the prime ideal, as a polynomial
    /// mod p (the ideal is (p, g(θ))).
    pub generator: Poly<PrimeField>,
    /// Ramification index e.
    pub e: u32,
    /// Residue degree f = deg(generator).
    pub f: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSource {
    Computed,
    Override,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSplitting {
    pub p: BigUint,
    /// Sorted canonically by generator; Σ e·f = degree of the field.
    pub primes_above: Vec<PrimeIdealFactor>,
    pub source: SplitSource,
}

#[derive(Debug, Clone)]
pub struct OverrideSpec {
    pub p: BigUint,
    /// (e, f, generator coefficients lowest-first).
    pub entries: Vec<(u32, u32, Vec<BigInt>)>,
}

#[derive(Debug, Clone)]
pub struct NumberField {
    label: String,
    /// Monic, lowest degree first, length degree+1.
    coeffs: Vec<BigInt>,
    degree: usize,
    poly_disc: BigInt,
    trusted: bool,
    /// Prime p for which f was certified irreducible mod p, if any.
    certificate: Option<u64>,
    overrides: HashMap<BigUint, Vec<PrimeIdealFactor>>,
    cache: Arc<Mutex<HashMap<BigUint, Arc<PrimeSplitting>>>>,
}

impl NumberField {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn defining_poly(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn poly_disc(&self) -> &BigInt {
        &self.poly_disc
    }

    pub fn trusted(&self) -> bool {
        self.trusted
    }

    pub fn irreducibility_certificate(&self) -> Option<u64> {
        self.certificate
    }

    /// f reduced mod p.
    pub fn poly_mod(&self, p: &BigUint) -> Poly<PrimeField> {
        let field = PrimeField::new(p.clone());
        let pi = BigInt::from_biguint(Sign::Plus, p.clone());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut r = c % &pi;
                if r.is_negative() {
                    r += &pi;
                }
                r.magnitude().clone()
            })
            .collect();
        Poly::from_coeffs(field, coeffs)
    }
}

/// Validate a defining polynomial and assemble a field descriptor.
pub fn make_field(
    label: &str,
    coeffs: Vec<BigInt>,
    overrides: Vec<OverrideSpec>,
    trusted: bool,
) -> Result<NumberField> {
    let mut coeffs = coeffs;
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let degree = coeffs.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| {
        Error::BadFieldFile("defining polynomial must have degree at least 1".into())
    })?;
    if !coeffs[degree].is_one() {
        return Err(Error::BadFieldFile(
            "defining polynomial must be monic".into(),
        ));
    }
    let poly_disc = poly_discriminant(&coeffs);
    if poly_disc.is_zero() {
        return Err(Error::BadFieldFile(
            "defining polynomial is not squarefree".into(),
        ));
    }

    let mut field = NumberField {
        label: label.to_string(),
        coeffs,
        degree,
        poly_disc,
        trusted,
        certificate: None,
        overrides: HashMap::new(),
        cache: Arc::new(Mutex::new(HashMap::new())),
    };

    // certificate: f irreducible mod p for some good prime among the first 50
    let mut tried = 0usize;
    let mut p = 2u64;
    while tried < 50 {
        if is_prime_u64(p) {
            tried += 1;
            let pb = BigUint::from(p);
            let divides =
                (&field.poly_disc % BigInt::from_biguint(Sign::Plus, pb.clone())).is_zero();
            if !divides && is_irreducible(&field.poly_mod(&pb)) {
                field.certificate = Some(p);
                break;
            }
        }
        p += 1;
    }
    if field.certificate.is_none() && !trusted {
        return Err(Error::BadFieldFile(format!(
            "irreducibility unverified for {label}: no certificate among the first 50 primes; \
             set trusted=true if the polynomial is known irreducible"
        )));
    }

    for ov in overrides {
        let entries = validate_override(&field, &ov)?;
        field.overrides.insert(ov.p, entries);
    }
    Ok(field)
}

fn validate_override(field: &NumberField, ov: &OverrideSpec) -> Result<Vec<PrimeIdealFactor>> {
    let mut rng = RandomSource::from_seed(0);
    if !is_probable_prime(&ov.p, 64, &mut rng) {
        return Err(Error::BadOverride(format!("{} is not prime", ov.p)));
    }
    let fp = PrimeField::new(ov.p.clone());
    let pi = BigInt::from_biguint(Sign::Plus, ov.p.clone());
    let mut out = Vec::new();
    let mut ef_sum = 0u64;
    for (e, f, gen) in &ov.entries {
        if *e < 1 || *f < 1 {
            return Err(Error::BadOverride("e and f must be at least 1".into()));
        }
        let coeffs = gen
            .iter()
            .map(|c| {
                let mut r = c % &pi;
                if r.is_negative() {
                    r += &pi;
                }
                r.magnitude().clone()
            })
            .collect();
        let g = Poly::from_coeffs(fp.clone(), coeffs);
        if g.degree() != Some(*f as usize) {
            return Err(Error::BadOverride(format!(
                "generator degree {:?} does not match residue degree {f}",
                g.degree()
            )));
        }
        if !g.is_monic() {
            return Err(Error::BadOverride("generator must be monic mod p".into()));
        }
        if !is_irreducible(&g) {
            return Err(Error::BadOverride(format!(
                "generator {} is reducible mod {}",
                g.render("x", |c| c.to_string()),
                ov.p
            )));
        }
        ef_sum += *e as u64 * *f as u64;
        out.push(PrimeIdealFactor {
            generator: g,
            e: *e,
            f: *f,
        });
    }
    if ef_sum != field.degree as u64 {
        return Err(Error::BadOverride(format!(
            "Σ e·f = {ef_sum} but the field has degree {}",
            field.degree
        )));
    }
    out.sort_by(|a, b| a.generator.cmp_canonical(&b.generator));
    for w in out.windows(2) {
        if w[0].generator == w[1].generator {
            return Err(Error::BadOverride("generators must be distinct".into()));
        }
    }
    Ok(out)
}

/// How p splits in the maximal order: override if present, else factor
/// f mod p and certify with the Dedekind criterion. Results are cached.
pub fn split_prime(
    field: &NumberField,
    p: &BigUint,
    rng: &mut RandomSource,
) -> Result<Arc<PrimeSplitting>> {
    if let Some(hit) = field.cache.lock().unwrap().get(p) {
        return Ok(hit.clone());
    }
    if !is_probable_prime(p, 64, rng) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let split = if let Some(entries) = field.overrides.get(p) {
        PrimeSplitting {
            p: p.clone(),
            primes_above: entries.clone(),
            source: SplitSource::Override,
        }
    } else {
        let f_mod = field.poly_mod(p);
        let factors = factor_poly(&f_mod, rng)?;
        if !dedekind_criterion_passes(field, p, &factors) {
            return Err(Error::DedekindFailure {
                f: render_z_poly(&field.coeffs),
                p: p.to_string(),
            });
        }
        let mut primes_above: Vec<PrimeIdealFactor> = factors
            .into_iter()
            .map(|(g, mult)| {
                let f_res = g.degree().expect("irreducible factors are nonconstant") as u32;
                PrimeIdealFactor {
                    generator: g,
                    e: mult as u32,
                    f: f_res,
                }
            })
            .collect();
        primes_above.sort_by(|a, b| a.generator.cmp_canonical(&b.generator));
        PrimeSplitting {
            p: p.clone(),
            primes_above,
            source: SplitSource::Computed,
        }
    };
    let arc = Arc::new(split);
    field
        .cache
        .lock()
        .unwrap()
        .insert(p.clone(), arc.clone());
    Ok(arc)
}

/// Dedekind's index criterion: with f̄ = Π ḡ_i^{e_i} mod p, set
/// g = Π ḡ_i (radical), h = f̄/g, and T = (gh − f)/p over ℤ. Then
/// p ∤ [O_K : ℤ[θ]] iff gcd(T̄, ḡ, h̄) = 1 mod p.
fn dedekind_criterion_passes(
    field: &NumberField,
    p: &BigUint,
    factors: &[(Poly<PrimeField>, usize)],
) -> bool {
    let fp = PrimeField::new(p.clone());
    let mut g_bar = Poly::one(fp.clone());
    let mut h_bar = Poly::one(fp.clone());
    for (gi, e) in factors {
        g_bar = g_bar.mul(gi);
        for _ in 1..*e {
            h_bar = h_bar.mul(gi);
        }
    }
    // lift to Z[x] with coefficients in [0, p), multiply there, subtract f,
    // divide by p coefficient-wise (exact), reduce back mod p
    let pz = BigInt::from_biguint(Sign::Plus, p.clone());
    let lift = |q: &Poly<PrimeField>| -> Vec<BigInt> {
        (0..=q.degree().unwrap_or(0))
            .map(|i| BigInt::from_biguint(Sign::Plus, q.coeff(i)))
            .collect()
    };
    let gz = lift(&g_bar);
    let hz = lift(&h_bar);
    let mut prod = vec![BigInt::zero(); gz.len() + hz.len() - 1];
    for (i, a) in gz.iter().enumerate() {
        for (j, b) in hz.iter().enumerate() {
            prod[i + j] += a * b;
        }
    }
    let n = field.coeffs.len().max(prod.len());
    let t_bar_coeffs: Vec<BigUint> = (0..n)
        .map(|i| {
            let gh = prod.get(i).cloned().unwrap_or_else(BigInt::zero);
            let fc = field.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero);
            let diff = gh - fc;
            debug_assert!((&diff % &pz).is_zero(), "gh - f not divisible by p");
            let t = diff / &pz;
            let mut r = t % &pz;
            if r.is_negative() {
                r += &pz;
            }
            r.magnitude().clone()
        })
        .collect();
    let t_bar = Poly::from_coeffs(fp, t_bar_coeffs);
    let d = t_bar.gcd(&g_bar).gcd(&h_bar);
    d.degree() == Some(0)
}

fn render_z_poly(coeffs: &[BigInt]) -> String {
    let field_free: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => c.to_string(),
            1 if c.is_one() => "x".into(),
            1 => format!("{c}*x"),
            _ if c.is_one() => format!("x^{i}"),
            _ => format!("{c}*x^{i}"),
        })
        .collect();
    field_free.join(" + ")
}

/// disc(f) = (−1)^(d(d−1)/2) · res(f, f′) for monic f.
pub fn poly_discriminant(coeffs: &[BigInt]) -> BigInt {
    let d = coeffs.len() - 1;
    if d == 1 {
        return BigInt::one();
    }
    let deriv: Vec<BigInt> = (1..=d).map(|i| &coeffs[i] * BigInt::from(i)).collect();
    let res = resultant(coeffs, &deriv);
    let sign = if (d * (d - 1) / 2) % 2 == 0 { 1 } else { -1 };
    res * BigInt::from(sign)
}

/// Resultant of two integer polynomials via the Sylvester determinant
/// (fraction-free Bareiss elimination, exact).
fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (k, c) in a.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..m {
        for (k, c) in b.iter().rev().enumerate() {
            mat[n + row][row + k] = c.clone();
        }
    }
    determinant_bareiss(mat)
}

fn determinant_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev; // exact by Bareiss
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

// ---------------------------------------------------------------------------
// field description files

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Num(i64),
    Str(String),
}

impl JsonInt {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            JsonInt::Num(v) => Ok(BigInt::from(*v)),
            JsonInt::Str(s) => s
                .parse()
                .map_err(|_| Error::BadFieldFile(format!("bad integer literal {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
struct FieldFile {
    label: String,
    poly: Vec<JsonInt>,
    #[serde(default)]
    trusted: bool,
    #[serde(default)]
    overrides: HashMap<String, Vec<(u32, u32, Vec<JsonInt>)>>,
}

/// Parse a field description: `{"label", "poly" (coefficients lowest degree
/// first, integers or decimal strings), "trusted", "overrides": {"p":
/// [[e, f, [gen coeffs]], ...]}}`.
pub fn field_from_json(text: &str) -> Result<NumberField> {
    let file: FieldFile = serde_json::from_str(text)?;
    let coeffs = file
        .poly
        .iter()
        .map(|c| c.to_bigint())
        .collect::<Result<Vec<_>>>()?;
    let mut overrides = Vec::new();
    for (p_str, entries) in file.overrides {
        let p: BigUint = p_str
            .trim()
            .parse()
            .map_err(|_| Error::BadFieldFile(format!("bad prime key {p_str:?}")))?;
        let entries = entries
            .into_iter()
            .map(|(e, f, gen)| {
                let gen = gen
                    .iter()
                    .map(|c| c.to_bigint())
                    .collect::<Result<Vec<_>>>()?;
                Ok((e, f, gen))
            })
            .collect::<Result<Vec<_>>>()?;
        overrides.push(OverrideSpec { p, entries });
    }
    make_field(&file.label, coeffs, overrides, file.trusted)
}

pub fn field_from_file(path: &std::path::Path) -> Result<NumberField> {
    field_from_json(&std::fs::read_to_string(path)?)
}
