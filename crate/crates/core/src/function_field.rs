//! The function-field analogue: ideals of the integral closure of F_q[t]
//! in a degree-d extension K = F_q(t)[y]/(f), norms sampled with
//! probability proportional to D(g).
//!
//! A polynomial g ∈ F_q[t] is read as an integer base q (`encode`), and the
//! integer chains of the norm sampler run unchanged; a chain value s is
//! retained when `decode`(s) is a prime element, i.e. monic irreducible.
//! The digit map is not multiplicative, so the object the algorithm really
//! produces is the *multiset* of retained irreducibles, with g their
//! polynomial product and r = Π s the integer bookkeeping that ψ, Ω_d and
//! the size condition are computed on. Monic retention is what makes the
//! map multiset → g a bijection (witness over F_3: {t,t} and {2t,2t} would
//! both multiply to t²), which is exactly the property the proportionality
//! argument needs.
//!
//! Unlike the integer case, irreducibility has nothing to do with the
//! parity of the encoding (decode(4) = t+1 over F_3), so every residue
//! class 1..=d carries a chain. Two supports are offered: encoding-bounded
//! mode accepts onto S = {g : r < q^{N+1}} with denominator q^{N+1}; the
//! exact-degree mode accepts onto S = {g : deg g ≤ N} with the inflated
//! denominator q^{2N+1} (r < q^{2N} always, so acceptance stays ≤ 1 at the
//! price of exponentially more trials — desk scale only).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;

use crate::arith::{binomial_coeff, is_probable_prime};
use crate::ideals::SolutionTable;
use crate::number_field::SplitSource;
use crate::poly::{Poly, PrimeField, ResidueField};
use crate::polyfactor::{factor_over_residue_field, factor_poly, is_irreducible};
use crate::rng::RandomSource;
use crate::sampler::{chain_step_big, chain_step_fast};
use crate::{Error, Result};

/// A chain this long means the continuation law broke.
const CHAIN_STEP_LIMIT: u64 = 1_000_000;
/// Rejection-loop guard.
const TRIAL_LIMIT: u64 = 100_000_000;
/// Bound on q^{N+1} up to which the eligibility table (and with it the fast
/// engine, the exact candidate law and enumeration) is built.
const FF_TABLE_LIMIT: u64 = 1 << 16;
/// Splitting runs off a fixed-seed source — factorization output is
/// canonical whatever the seed, and the sampling stream stays independent
/// of cache state.
const SPLIT_SEED: u64 = 0x5EED_1DEA;

// ---------------------------------------------------------------------------
// the base-q digit bijection

/// n(g): read the coefficients of g as digits of a base-q integer.
pub fn encode(g: &Poly<PrimeField>) -> BigUint {
    let q = g.field().modulus();
    let mut acc = BigUint::zero();
    for c in g.coeffs().iter().rev() {
        acc = acc * q + c;
    }
    acc
}

/// β(n): the polynomial whose coefficients are the base-q digits of n.
pub fn decode(n: &BigUint, field: &PrimeField) -> Poly<PrimeField> {
    let q = field.modulus();
    let mut digits = Vec::new();
    let mut rest = n.clone();
    while !rest.is_zero() {
        digits.push(&rest % q);
        rest /= q;
    }
    Poly::from_coeffs(field.clone(), digits)
}

/// The retention predicate: a prime element under the monic convention.
fn eligible_poly(g: &Poly<PrimeField>) -> bool {
    g.is_monic() && is_irreducible(g)
}

fn eligible_value(s: &BigUint, base: &PrimeField) -> bool {
    eligible_poly(&decode(s, base))
}

// ---------------------------------------------------------------------------
// field descriptors and splitting

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFPrimeIdealFactor {
    /// Monic irreducible generator over the residue field F_q[t]/(π); the
    /// prime ideal is (π, g(y)).
    pub generator: Poly<ResidueField>,
    /// Ramification index e.
    pub e: u32,
    /// Residue degree f = deg_y(generator).
    pub f: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFSplitting {
    pub pi: Poly<PrimeField>,
    /// Sorted canonically by generator; Σ e·f = degree of the field.
    pub primes_above: Vec<FFPrimeIdealFactor>,
    pub source: SplitSource,
}

#[derive(Debug, Clone)]
pub struct FFOverrideSpec {
    /// Encoded monic irreducible π.
    pub pi: BigUint,
    /// (e, f, generator coefficients as encoded residue elements, lowest
    /// power of y first).
    pub entries: Vec<(u32, u32, Vec<BigUint>)>,
}

#[derive(Debug, Clone)]
pub struct FunctionField {
    label: String,
    base: PrimeField,
    /// Coefficients of the defining polynomial in y, lowest first, each an
    /// element of F_q[t]; monic in y, length degree+1.
    poly_y: Vec<Poly<PrimeField>>,
    degree: usize,
    overrides: HashMap<BigUint, Vec<FFPrimeIdealFactor>>,
    cache: Arc<Mutex<HashMap<BigUint, Arc<FFSplitting>>>>,
}

impl FunctionField {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn defining_poly(&self) -> &[Poly<PrimeField>] {
        &self.poly_y
    }
}

fn render_ff_poly(poly_y: &[Poly<PrimeField>]) -> String {
    let terms: Vec<String> = poly_y
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let cs = c.render("t", |e| e.to_string());
            let coeff = if c.degree().is_some_and(|d| d >= 1) {
                format!("({cs})")
            } else {
                cs
            };
            match i {
                0 => coeff,
                1 if c.is_one() => "y".into(),
                1 => format!("{coeff}*y"),
                _ if c.is_one() => format!("y^{i}"),
                _ => format!("{coeff}*y^{i}"),
            }
        })
        .collect();
    terms.join(" + ")
}

/// Validate a defining polynomial over F_q[t] and assemble the descriptor.
/// Coefficients arrive as raw integers and are reduced mod q.
pub fn make_function_field(
    label: Option<&str>,
    q: &BigUint,
    poly_y: Vec<Vec<BigUint>>,
    overrides: Vec<FFOverrideSpec>,
) -> Result<FunctionField> {
    let mut probe = RandomSource::from_seed(0);
    if !is_probable_prime(q, 64, &mut probe) {
        return Err(Error::BadFieldFile(format!(
            "base field order {q} is not prime"
        )));
    }
    let base = PrimeField::new(q.clone());
    let mut coeffs: Vec<Poly<PrimeField>> = poly_y
        .into_iter()
        .map(|c| Poly::from_coeffs(base.clone(), c.into_iter().map(|v| v % q).collect()))
        .collect();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let degree = coeffs.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| {
        Error::BadFieldFile("defining polynomial must have degree at least 1 in y".into())
    })?;
    if !coeffs[degree].is_one() {
        return Err(Error::BadFieldFile(
            "defining polynomial must be monic in y".into(),
        ));
    }
    let label = label
        .map(str::to_string)
        .unwrap_or_else(|| format!("F_{q}[t][y]/({})", render_ff_poly(&coeffs)));
    let mut field = FunctionField {
        label,
        base,
        poly_y: coeffs,
        degree,
        overrides: HashMap::new(),
        cache: Arc::new(Mutex::new(HashMap::new())),
    };
    for ov in overrides {
        let entries = validate_ff_override(&field, &ov)?;
        field.overrides.insert(ov.pi, entries);
    }
    Ok(field)
}

fn validate_ff_override(field: &FunctionField, ov: &FFOverrideSpec) -> Result<Vec<FFPrimeIdealFactor>> {
    let pi = decode(&ov.pi, &field.base);
    if !eligible_poly(&pi) {
        return Err(Error::BadOverride(format!(
            "{} is not a monic irreducible polynomial",
            pi.render("t", |c| c.to_string())
        )));
    }
    let rf = ResidueField::new(pi);
    let mut out = Vec::new();
    let mut ef_sum = 0u64;
    for (e, f, gen) in &ov.entries {
        if *e < 1 || *f < 1 {
            return Err(Error::BadOverride("e and f must be at least 1".into()));
        }
        let elems: Vec<Poly<PrimeField>> = gen
            .iter()
            .map(|c| rf.embed(&decode(c, &field.base)))
            .collect();
        let g = Poly::from_coeffs(rf.clone(), elems);
        if g.degree() != Some(*f as usize) {
            return Err(Error::BadOverride(format!(
                "generator degree {:?} does not match residue degree {f}",
                g.degree()
            )));
        }
        if !g.is_monic() {
            return Err(Error::BadOverride(
                "generator must be monic over the residue field".into(),
            ));
        }
        if !is_irreducible(&g) {
            return Err(Error::BadOverride(
                "generator is reducible over the residue field".into(),
            ));
        }
        ef_sum += *e as u64 * *f as u64;
        out.push(FFPrimeIdealFactor {
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

/// How π splits in the integral closure: override if present, else factor
/// the defining polynomial over F_q[t]/(π) and certify with the Dedekind
/// criterion. Results are cached.
pub fn ff_split(
    field: &FunctionField,
    pi: &Poly<PrimeField>,
    rng: &mut RandomSource,
) -> Result<Arc<FFSplitting>> {
    let key = encode(pi);
    if let Some(hit) = field.cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    if !pi.is_monic() {
        return Err(Error::BadParameter(format!(
            "{} is not monic",
            pi.render("t", |c| c.to_string())
        )));
    }
    let split = if let Some(entries) = field.overrides.get(&key) {
        FFSplitting {
            pi: pi.clone(),
            primes_above: entries.clone(),
            source: SplitSource::Override,
        }
    } else {
        // raises ReducibleModulus when π is not irreducible
        let factors = factor_over_residue_field(&field.poly_y, pi, rng)?;
        if !ff_dedekind_passes(field, pi, &factors) {
            return Err(Error::SplittingUnavailable(
                pi.render("t", |c| c.to_string()),
            ));
        }
        let mut primes_above: Vec<FFPrimeIdealFactor> = factors
            .into_iter()
            .map(|(g, mult)| {
                let f_res = g.degree().expect("irreducible factors are nonconstant") as u32;
                FFPrimeIdealFactor {
                    generator: g,
                    e: mult as u32,
                    f: f_res,
                }
            })
            .collect();
        primes_above.sort_by(|a, b| a.generator.cmp_canonical(&b.generator));
        FFSplitting {
            pi: pi.clone(),
            primes_above,
            source: SplitSource::Computed,
        }
    };
    let arc = Arc::new(split);
    field.cache.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

/// The Dedekind criterion transplanted to F_q[t][y]: with f̄ = Π ḡ_i^{e_i}
/// mod π, set g = Π ḡ_i, h = f̄/g and T = (gh − f)/π over F_q[t][y]; π does
/// not divide the conductor iff gcd(T̄, ḡ, h̄) = 1 over F_q[t]/(π).
fn ff_dedekind_passes(
    field: &FunctionField,
    pi: &Poly<PrimeField>,
    factors: &[(Poly<ResidueField>, usize)],
) -> bool {
    let rf = ResidueField::new(pi.clone());
    let mut g_bar = Poly::one(rf.clone());
    let mut h_bar = Poly::one(rf.clone());
    for (gi, e) in factors {
        g_bar = g_bar.mul(gi);
        for _ in 1..*e {
            h_bar = h_bar.mul(gi);
        }
    }
    // lift to F_q[t][y] (coefficients are already reduced t-polynomials),
    // multiply by convolution in y, subtract f, divide by π exactly
    let lift = |w: &Poly<ResidueField>| -> Vec<Poly<PrimeField>> {
        (0..=w.degree().unwrap_or(0)).map(|i| w.coeff(i)).collect()
    };
    let gz = lift(&g_bar);
    let hz = lift(&h_bar);
    let mut prod = vec![Poly::zero(field.base.clone()); gz.len() + hz.len() - 1];
    for (i, a) in gz.iter().enumerate() {
        for (j, b) in hz.iter().enumerate() {
            prod[i + j] = prod[i + j].add(&a.mul(b));
        }
    }
    let n = field.poly_y.len().max(prod.len());
    let t_coeffs: Vec<Poly<PrimeField>> = (0..n)
        .map(|i| {
            let gh = prod
                .get(i)
                .cloned()
                .unwrap_or_else(|| Poly::zero(field.base.clone()));
            let fc = field
                .poly_y
                .get(i)
                .cloned()
                .unwrap_or_else(|| Poly::zero(field.base.clone()));
            let t = gh
                .sub(&fc)
                .div_exact(pi)
                .expect("gh - f divisible by pi");
            rf.embed(&t)
        })
        .collect();
    let t_bar = Poly::from_coeffs(rf, t_coeffs);
    let d = t_bar.gcd(&g_bar).gcd(&h_bar);
    d.degree() == Some(0)
}

// ---------------------------------------------------------------------------
// factored polynomials

/// A monic polynomial together with its factorization into monic
/// irreducibles, sorted by encoding. The sampler's norm type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFFactoredPoly {
    value: Poly<PrimeField>,
    factors: Vec<(Poly<PrimeField>, u32)>,
}

impl FFFactoredPoly {
    pub fn one(base: &PrimeField) -> Self {
        FFFactoredPoly {
            value: Poly::one(base.clone()),
            factors: Vec::new(),
        }
    }

    /// Assemble from (irreducible, exponent) pairs; duplicates merge.
    pub fn from_factors(
        base: &PrimeField,
        factors: impl IntoIterator<Item = (Poly<PrimeField>, u32)>,
    ) -> Result<Self> {
        let mut merged: Vec<(BigUint, Poly<PrimeField>, u32)> = Vec::new();
        for (pi, e) in factors {
            if e == 0 {
                continue;
            }
            if !eligible_poly(&pi) {
                return Err(Error::BadParameter(format!(
                    "{} is not a monic irreducible polynomial",
                    pi.render("t", |c| c.to_string())
                )));
            }
            let s = encode(&pi);
            match merged.iter_mut().find(|(key, _, _)| *key == s) {
                Some((_, _, acc)) => *acc += e,
                None => merged.push((s, pi, e)),
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        let mut value = Poly::one(base.clone());
        for (_, pi, e) in &merged {
            for _ in 0..*e {
                value = value.mul(pi);
            }
        }
        Ok(FFFactoredPoly {
            value,
            factors: merged.into_iter().map(|(_, pi, e)| (pi, e)).collect(),
        })
    }

    /// Factor a monic polynomial from scratch.
    pub fn factor(g: &Poly<PrimeField>, rng: &mut RandomSource) -> Result<Self> {
        if !g.is_monic() {
            return Err(Error::BadParameter("norms are monic polynomials".into()));
        }
        if g.is_one() {
            return Ok(FFFactoredPoly::one(g.field()));
        }
        let factors = factor_poly(g, rng)?;
        let out = FFFactoredPoly::from_factors(
            g.field(),
            factors.into_iter().map(|(pi, e)| (pi, e as u32)),
        )?;
        debug_assert_eq!(&out.value, g);
        Ok(out)
    }

    pub fn value(&self) -> &Poly<PrimeField> {
        &self.value
    }

    /// (irreducible, exponent) pairs, encoding ascending.
    pub fn factors(&self) -> &[(Poly<PrimeField>, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u64 {
        self.value.degree().unwrap_or(0) as u64
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer bookkeeping r = Π n(π)^e. Not n(value): the digit map is
    /// not multiplicative.
    pub fn encode_product(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (pi, e) in &self.factors {
            acc *= encode(pi).pow(*e);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// sampler parameters

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FFMode {
    /// Support S = {g : Π n(π_i)^{e_i} < q^{N+1}}, denominator q^{N+1}.
    /// Efficient; a proper subset of {deg g ≤ N}.
    EncodingBounded,
    /// Support S = {deg g ≤ N}, denominator q^{2N+1}. Exponentially more
    /// trials — desk scale only.
    ExactDegree,
}

/// Everything sampling needs that depends only on (field, N, mode).
pub struct FFSamplerParams {
    field: FunctionField,
    n: u64,
    mode: FFMode,
    /// d itself — irreducibility of a decoded value is unrelated to the
    /// parity of its encoding, so every residue class carries a chain.
    modulus: u64,
    residues: Vec<u64>,
    /// q^{N+1}: chains range below this.
    bound: BigUint,
    caps: Vec<BigUint>,
    /// ⌊log₂(q^{N+1} − 1)⌋, the exponent cap used by the acceptance bound.
    l: u64,
    /// 1/binom(d+L−1, L), the per-small-step damping factor.
    alpha: BigRational,
    /// Integers p ≤ d with decode(p) monic irreducible: the direct
    /// geometric step covers exactly these (empty whenever q > d).
    small: Vec<u64>,
    /// Degrees of the decoded small values, parallel to `small`.
    small_deg: Vec<u32>,
    /// q^{N+1} (encoding-bounded) or q^{2N+1} (exact-degree).
    accept_den: BigUint,
    fast: Option<FFFastCtx>,
    z_tail: OnceLock<BigRational>,
    dcache: Mutex<HashMap<(u64, u32), BigUint>>,
}

/// Machine-word tables, present when q^{N+1} ≤ FF_TABLE_LIMIT.
struct FFFastCtx {
    bound: u64,
    caps: Vec<u64>,
    /// eligible[s]: decode(s) is monic irreducible.
    eligible: Vec<bool>,
    /// deg[s]: degree of decode(s).
    deg: Vec<u32>,
    /// accept_den · binom^{|small|} when it fits a double word.
    accept_static: Option<u128>,
}

impl FFSamplerParams {
    pub fn field(&self) -> &FunctionField {
        &self.field
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mode(&self) -> FFMode {
        self.mode
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn bound(&self) -> &BigUint {
        &self.bound
    }

    pub fn caps(&self) -> &[BigUint] {
        &self.caps
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn small_steps(&self) -> &[u64] {
        &self.small
    }

    pub fn accept_den(&self) -> &BigUint {
        &self.accept_den
    }
}

pub fn ff_derive_params(field: &FunctionField, n: u64, mode: FFMode) -> Result<FFSamplerParams> {
    if n == 0 {
        return Err(Error::BadParameter("degree bound must be at least 1".into()));
    }
    let d = field.degree as u64;
    let q = field.base.modulus().clone();
    let exp = u32::try_from(n + 1)
        .map_err(|_| Error::BadParameter("degree bound too large".into()))?;
    let bound = q.pow(exp);
    let modulus = d;
    let residues: Vec<u64> = (1..=d).collect();
    let caps: Vec<BigUint> = residues
        .iter()
        .map(|&b| {
            if &bound - 1u32 >= BigUint::from(b) {
                (&bound - 1u32 - b) / d
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let l = (&bound - 1u32).bits() - 1;
    let binom = binomial_coeff(d + l - 1, l)?;
    let alpha = BigRational::new(BigInt::one(), BigInt::from(binom.clone()));
    let small: Vec<u64> = (2..=d)
        .filter(|&p| eligible_value(&BigUint::from(p), &field.base))
        .collect();
    let small_deg: Vec<u32> = small
        .iter()
        .map(|&p| decode(&BigUint::from(p), &field.base).degree().unwrap_or(0) as u32)
        .collect();
    let accept_den = match mode {
        FFMode::EncodingBounded => bound.clone(),
        FFMode::ExactDegree => {
            let exp2 = u32::try_from(2 * n + 1)
                .map_err(|_| Error::BadParameter("degree bound too large".into()))?;
            q.pow(exp2)
        }
    };
    let fast = bound
        .to_u64()
        .filter(|&b| b <= FF_TABLE_LIMIT)
        .map(|b64| {
            let caps = residues
                .iter()
                .map(|&b| if b64 - 1 >= b { (b64 - 1 - b) / d } else { 0 })
                .collect();
            let mut eligible = vec![false; b64 as usize];
            let mut deg = vec![0u32; b64 as usize];
            for s in 2..b64 {
                let g = decode(&BigUint::from(s), &field.base);
                deg[s as usize] = g.degree().unwrap_or(0) as u32;
                eligible[s as usize] = eligible_poly(&g);
            }
            let accept_static = accept_den.to_u128().and_then(|den| {
                let b = binom.to_u128()?;
                (0..small.len()).try_fold(den, |acc, _| acc.checked_mul(b))
            });
            FFFastCtx {
                bound: b64,
                caps,
                eligible,
                deg,
                accept_static,
            }
        });
    Ok(FFSamplerParams {
        field: field.clone(),
        n,
        mode,
        modulus,
        residues,
        bound,
        caps,
        l,
        alpha,
        small,
        small_deg,
        accept_den,
        fast,
        z_tail: OnceLock::new(),
        dcache: Mutex::new(HashMap::new()),
    })
}

// ---------------------------------------------------------------------------
// candidate generation and exact laws

/// Full record of one candidate round.
#[derive(Debug, Clone)]
pub struct FFCandidateTrace {
    /// One (residue, sequence) pair per class; sequences are non-increasing
    /// within the class and end at the terminal 1.
    pub chains: Vec<(u64, Vec<BigUint>)>,
    /// (p, exponent) per small step, zero exponents included.
    pub small_exponents: Vec<(u64, u32)>,
    /// The multiset of retained irreducibles, as the factored polynomial
    /// product g = Π decode(s)^mult.
    pub candidate: FFFactoredPoly,
}

/// Faithful candidate generator: full per-class chains with monic
/// irreducible retention, then geometric small steps. Mode-independent —
/// the mode only shapes acceptance.
pub fn ff_generate_candidate(
    params: &FFSamplerParams,
    rng: &mut RandomSource,
) -> Result<FFCandidateTrace> {
    let d = params.modulus;
    let base = params.field.base();
    let mut factors: Vec<(Poly<PrimeField>, u32)> = Vec::new();
    let mut chains = Vec::with_capacity(params.residues.len());
    for (i, &b) in params.residues.iter().enumerate() {
        let mut seq = Vec::new();
        let mut s = chain_step_big(&params.caps[i], d, b, rng)?;
        let mut steps = 0u64;
        loop {
            seq.push(s.clone());
            if s.is_one() {
                break;
            }
            let g = decode(&s, base);
            if eligible_poly(&g) {
                factors.push((g, 1));
            }
            steps += 1;
            if steps >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(steps));
            }
            let k = (&s - b) / d;
            s = chain_step_big(&k, d, b, rng)?;
        }
        chains.push((b, seq));
    }
    let mut small_exponents = Vec::with_capacity(params.small.len());
    for &p in &params.small {
        let mut e = 0u32;
        while rng.bernoulli_exact_u64(p - 1, p) {
            e += 1;
            if e as u64 >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(e as u64));
            }
        }
        if e > 0 {
            factors.push((decode(&BigUint::from(p), base), e));
        }
        small_exponents.push((p, e));
    }
    Ok(FFCandidateTrace {
        chains,
        small_exponents,
        candidate: FFFactoredPoly::from_factors(base, factors)?,
    })
}

/// Per-factor view used by the exact laws: (encoding, exponent).
fn encoded_parts(g: &FFFactoredPoly) -> Vec<(BigUint, u32)> {
    g.factors()
        .iter()
        .map(|(pi, e)| (encode(pi), *e))
        .collect()
}

/// ψ(r) on the integer bookkeeping: factors with n(π) ≤ d stay, factors
/// with s = n(π) > d are replaced by s − s̄ + 1 (s̄ the class label).
fn ff_psi(parts: &[(BigUint, u32)], d: u64) -> BigUint {
    let mut acc = BigUint::one();
    for (s, e) in parts {
        if s.to_u64().is_some_and(|v| v <= d) {
            acc *= s.pow(*e);
        } else {
            let sbar = ((s - 1u32) % d).to_u64().unwrap();
            acc *= (s - sbar).pow(*e);
        }
    }
    acc
}

fn ff_omega_above(parts: &[(BigUint, u32)], d: u64) -> u64 {
    parts
        .iter()
        .filter(|(s, _)| s.to_u64().map_or(true, |v| v > d))
        .map(|(_, e)| *e as u64)
        .sum()
}

fn rat_pow(base: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// Π over eligible d < s < q^{N+1} of (1 − d/(s − s̄ + 1)): the probability
/// that no chain retains s.
fn z_tail_ff(params: &FFSamplerParams) -> Result<&BigRational> {
    let ctx = params.fast.as_ref().ok_or_else(|| {
        Error::BadParameter(format!(
            "exact candidate probabilities need q^(N+1) ≤ {FF_TABLE_LIMIT}"
        ))
    })?;
    Ok(params.z_tail.get_or_init(|| {
        let d = params.modulus;
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for s in (d + 1)..ctx.bound {
            if !ctx.eligible[s as usize] {
                continue;
            }
            let w = s - (s - 1) % d;
            num *= w - d;
            den *= w;
        }
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }))
}

/// Exact probability that `ff_generate_candidate` outputs this multiset:
/// geometric weights for the small steps, occurrence ratios for the chain
/// values, and the non-occurrence tail over every other eligible value.
pub fn ff_candidate_probability(
    params: &FFSamplerParams,
    g: &FFFactoredPoly,
) -> Result<BigRational> {
    let parts = encoded_parts(g);
    for (s, _) in &parts {
        if *s >= params.bound {
            return Err(Error::BadParameter(format!(
                "factor encoding {s} is not below q^(N+1) = {}",
                params.bound
            )));
        }
    }
    let d = params.modulus;
    let mut prob = z_tail_ff(params)?.clone();
    for &p in &params.small {
        let v = parts
            .iter()
            .find(|(s, _)| s.to_u64() == Some(p))
            .map_or(0, |(_, e)| *e);
        prob *= rat_pow(
            &BigRational::new(BigInt::from(p - 1), BigInt::from(p)),
            v,
        );
        prob /= BigInt::from(p);
    }
    // d^Ω / ψ(r) · Π_{small} p^{v_p} = Π_{s > d} (d/(s−s̄+1))^{e_s}
    let omega = u32::try_from(ff_omega_above(&parts, d))
        .map_err(|_| Error::BadParameter("exponent overflow".into()))?;
    let psi_val = ff_psi(&parts, d);
    let mut num = BigUint::from(d).pow(omega);
    for (s, e) in &parts {
        if s.to_u64().is_some_and(|v| v <= d) {
            num *= s.pow(*e);
        }
    }
    prob *= BigRational::new(BigInt::from(num), BigInt::from(psi_val));
    Ok(prob)
}

/// D(π^e) through the params-local count cache; the splitting itself is
/// cached on the field.
fn ff_count_fresh(params: &FFSamplerParams, pi: &Poly<PrimeField>, e: u32) -> Result<BigUint> {
    let mut source = RandomSource::from_seed(SPLIT_SEED);
    let split = ff_split(&params.field, pi, &mut source)?;
    let f_res = split.primes_above.iter().map(|x| x.f).collect();
    Ok(SolutionTable::build_from_degrees(f_res, e).count().clone())
}

fn ff_count_cached_u64(params: &FFSamplerParams, s: u64, e: u32) -> Result<BigUint> {
    if let Some(hit) = params.dcache.lock().unwrap().get(&(s, e)) {
        return Ok(hit.clone());
    }
    let pi = decode(&BigUint::from(s), params.field.base());
    let count = ff_count_fresh(params, &pi, e)?;
    params.dcache.lock().unwrap().insert((s, e), count.clone());
    Ok(count)
}

fn ff_count_prime_power_cached(
    params: &FFSamplerParams,
    pi: &Poly<PrimeField>,
    e: u32,
) -> Result<BigUint> {
    match encode(pi).to_u64() {
        Some(s) => ff_count_cached_u64(params, s, e),
        None => ff_count_fresh(params, pi, e),
    }
}

fn ff_count_norm_cached(params: &FFSamplerParams, g: &FFFactoredPoly) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (pi, e) in g.factors() {
        acc *= ff_count_prime_power_cached(params, pi, *e)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// D(g): the number of ideals of norm exactly g. Multiplicative over the
/// irreducible factors.
pub fn ff_count_norm(
    field: &FunctionField,
    g: &FFFactoredPoly,
    rng: &mut RandomSource,
) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (pi, e) in g.factors() {
        let split = ff_split(field, pi, rng)?;
        let f_res = split.primes_above.iter().map(|x| x.f).collect();
        acc *= SolutionTable::build_from_degrees(f_res, *e).count();
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

fn in_support(params: &FFSamplerParams, g: &FFFactoredPoly) -> bool {
    match params.mode {
        FFMode::EncodingBounded => g.encode_product() < params.bound,
        FFMode::ExactDegree => g.degree() <= params.n,
    }
}

/// The Bernoulli weight M(r)·ψ(r)·D(g)/(d^Ω·denom) that tilts the candidate
/// law into P(g) ∝ D(g) over the mode's support, with
/// M(r) = Π_{p ∈ small} α·(1/(p−1))^{v_p}. Exactly 0 when D(g) = 0; always
/// within [0, 1]. Errors when g lies outside the support.
pub fn ff_acceptance_probability(
    params: &FFSamplerParams,
    g: &FFFactoredPoly,
) -> Result<BigRational> {
    if !in_support(params, g) {
        return Err(Error::BadParameter(match params.mode {
            FFMode::EncodingBounded => format!(
                "r = {} is not below q^(N+1) = {}",
                g.encode_product(),
                params.bound
            ),
            FFMode::ExactDegree => format!(
                "deg g = {} exceeds the degree bound {}",
                g.degree(),
                params.n
            ),
        }));
    }
    let d_count = ff_count_norm_cached(params, g)?;
    ff_acceptance_with_count(params, &encoded_parts(g), &d_count)
}

fn ff_acceptance_with_count(
    params: &FFSamplerParams,
    parts: &[(BigUint, u32)],
    d_count: &BigUint,
) -> Result<BigRational> {
    if d_count.is_zero() {
        return Ok(BigRational::zero());
    }
    let d = params.modulus;
    let omega = u32::try_from(ff_omega_above(parts, d))
        .map_err(|_| Error::BadParameter("exponent overflow".into()))?;
    let num = ff_psi(parts, d) * d_count;
    let mut den = BigUint::from(d).pow(omega) * &params.accept_den;
    let binom = params.alpha.denom().magnitude();
    for &p in &params.small {
        let v = parts
            .iter()
            .find(|(s, _)| s.to_u64() == Some(p))
            .map_or(0, |(_, e)| *e);
        den *= binom;
        den *= BigUint::from(p - 1).pow(v);
    }
    debug_assert!(num <= den);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

// ---------------------------------------------------------------------------
// the rejection loop

/// One candidate round on machine words, writing (encoding, exponent) pairs
/// into `parts` (unsorted). Returns false the moment the bookkeeping leaves
/// the mode's support, skipping the rest of the round's draws.
fn ff_run_trial_fast(
    params: &FFSamplerParams,
    ctx: &FFFastCtx,
    rng: &mut RandomSource,
    parts: &mut Vec<(u64, u32)>,
) -> Result<bool> {
    parts.clear();
    let d = params.modulus;
    let encoding = params.mode == FFMode::EncodingBounded;
    let mut rprod: u64 = 1;
    let mut degsum: u64 = 0;
    for (i, &b) in params.residues.iter().enumerate() {
        let mut s = chain_step_fast(ctx.caps[i], d, b, rng);
        let mut steps = 0u64;
        while s != 1 {
            if ctx.eligible[s as usize] {
                if encoding {
                    rprod = rprod.saturating_mul(s);
                    if rprod >= ctx.bound {
                        return Ok(false);
                    }
                } else {
                    degsum += ctx.deg[s as usize] as u64;
                    if degsum > params.n {
                        return Ok(false);
                    }
                }
                match parts.last_mut() {
                    Some(last) if last.0 == s => last.1 += 1,
                    _ => parts.push((s, 1)),
                }
            }
            steps += 1;
            if steps >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(steps));
            }
            s = chain_step_fast((s - b) / d, d, b, rng);
        }
    }
    for (&p, &pdeg) in params.small.iter().zip(&params.small_deg) {
        let mut e = 0u32;
        while rng.bernoulli_exact_u64(p - 1, p) {
            e += 1;
            if encoding {
                rprod = rprod.saturating_mul(p);
                if rprod >= ctx.bound {
                    return Ok(false);
                }
            } else {
                degsum += pdeg as u64;
                if degsum > params.n {
                    return Ok(false);
                }
            }
            if e as u64 >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(e as u64));
            }
        }
        if e > 0 {
            parts.push((p, e));
        }
    }
    Ok(true)
}

/// Big-integer mirror of `ff_run_trial_fast`: identical draws and identical
/// abandonment points for the same stream.
fn ff_run_trial_wide(
    params: &FFSamplerParams,
    rng: &mut RandomSource,
) -> Result<Option<Vec<(Poly<PrimeField>, u32)>>> {
    let d = params.modulus;
    let base = params.field.base();
    let encoding = params.mode == FFMode::EncodingBounded;
    let mut rprod = BigUint::one();
    let mut degsum: u64 = 0;
    let mut factors: Vec<(Poly<PrimeField>, u32)> = Vec::new();
    for (i, &b) in params.residues.iter().enumerate() {
        let mut s = chain_step_big(&params.caps[i], d, b, rng)?;
        let mut steps = 0u64;
        while !s.is_one() {
            let g = decode(&s, base);
            if eligible_poly(&g) {
                if encoding {
                    rprod *= &s;
                    if rprod >= params.bound {
                        return Ok(None);
                    }
                } else {
                    degsum += g.degree().unwrap_or(0) as u64;
                    if degsum > params.n {
                        return Ok(None);
                    }
                }
                factors.push((g, 1));
            }
            steps += 1;
            if steps >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(steps));
            }
            let k = (&s - b) / d;
            s = chain_step_big(&k, d, b, rng)?;
        }
    }
    for &p in &params.small {
        let mut e = 0u32;
        let g = decode(&BigUint::from(p), base);
        let gdeg = g.degree().unwrap_or(0) as u64;
        while rng.bernoulli_exact_u64(p - 1, p) {
            e += 1;
            if encoding {
                rprod *= p;
                if rprod >= params.bound {
                    return Ok(None);
                }
            } else {
                degsum += gdeg;
                if degsum > params.n {
                    return Ok(None);
                }
            }
            if e as u64 >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(e as u64));
            }
        }
        if e > 0 {
            factors.push((g, e));
        }
    }
    Ok(Some(factors))
}

/// u128 build of the acceptance fraction for the hot loop; None on overflow
/// (the exact big-rational route then draws the same stream).
fn ff_fast_acceptance_fraction(
    params: &FFSamplerParams,
    ctx: &FFFastCtx,
    parts: &[(u64, u32)],
    d_count: &BigUint,
) -> Option<(u128, u128)> {
    let d = params.modulus as u128;
    let mut num = d_count.to_u128()?;
    let mut den = ctx.accept_static?;
    for &(s, e) in parts {
        if s <= params.modulus {
            num = num.checked_mul((s as u128).checked_pow(e)?)?;
            den = den.checked_mul(((s - 1) as u128).checked_pow(e)?)?;
        } else {
            let w = (s - (s - 1) % params.modulus) as u128;
            num = num.checked_mul(w.checked_pow(e)?)?;
            den = den.checked_mul(d.checked_pow(e)?)?;
        }
    }
    Some((num, den))
}

fn parts_to_factored(params: &FFSamplerParams, parts: &[(u64, u32)]) -> Result<FFFactoredPoly> {
    let base = params.field.base();
    FFFactoredPoly::from_factors(
        base,
        parts
            .iter()
            .map(|&(s, e)| (decode(&BigUint::from(s), base), e)),
    )
}

fn ff_accept_fast(
    params: &FFSamplerParams,
    ctx: &FFFastCtx,
    parts: &[(u64, u32)],
    rng: &mut RandomSource,
) -> Result<Option<FFFactoredPoly>> {
    let mut d_count = BigUint::one();
    for &(s, e) in parts {
        d_count *= ff_count_cached_u64(params, s, e)?;
        if d_count.is_zero() {
            // rejected for certain: no Bernoulli draw
            return Ok(None);
        }
    }
    let accepted = match ff_fast_acceptance_fraction(params, ctx, parts, &d_count) {
        Some((num, den)) => rng.bernoulli_exact_u128(num, den),
        None => {
            let big: Vec<(BigUint, u32)> = parts
                .iter()
                .map(|&(s, e)| (BigUint::from(s), e))
                .collect();
            rng.bernoulli_exact(&ff_acceptance_with_count(params, &big, &d_count)?)?
        }
    };
    if !accepted {
        return Ok(None);
    }
    parts_to_factored(params, parts).map(Some)
}

/// Rejection loop: chain candidates, Bernoulli acceptance weighted by D(g).
/// Returns the accepted factored norm and the number of rounds consumed.
/// Conditional output law: P(g) = D(g)/Σ_{g′ ∈ S} D(g′).
pub fn ff_sample_norm(
    params: &FFSamplerParams,
    rng: &mut RandomSource,
) -> Result<(FFFactoredPoly, u64)> {
    let mut trials = 0u64;
    let mut parts: Vec<(u64, u32)> = Vec::new();
    loop {
        trials += 1;
        if trials > TRIAL_LIMIT {
            return Err(Error::SamplerStalled(trials));
        }
        match &params.fast {
            Some(ctx) => {
                if !ff_run_trial_fast(params, ctx, rng, &mut parts)? {
                    continue;
                }
                if let Some(g) = ff_accept_fast(params, ctx, &parts, rng)? {
                    return Ok((g, trials));
                }
            }
            None => {
                let Some(factors) = ff_run_trial_wide(params, rng)? else {
                    continue;
                };
                let g = FFFactoredPoly::from_factors(params.field.base(), factors)?;
                let d_count = ff_count_norm_cached(params, &g)?;
                if d_count.is_zero() {
                    continue;
                }
                let acc = ff_acceptance_with_count(params, &encoded_parts(&g), &d_count)?;
                if rng.bernoulli_exact(&acc)? {
                    return Ok((g, trials));
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ideals

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFIdealFactorEntry {
    pub pi: Poly<PrimeField>,
    pub generator: Poly<ResidueField>,
    pub e_ram: u32,
    pub f_res: u32,
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FFIdealFactorization {
    pub field_label: String,
    /// Grouped by π (encoding ascending), then by generator canonically.
    pub entries: Vec<FFIdealFactorEntry>,
    pub norm: FFFactoredPoly,
}

impl FFIdealFactorization {
    pub fn unit(field: &FunctionField) -> Self {
        FFIdealFactorization {
            field_label: field.label().to_string(),
            entries: Vec::new(),
            norm: FFFactoredPoly::one(field.base()),
        }
    }
}

/// Draw a uniformly random ideal whose norm lies in the mode's support:
/// sample the norm, then unrank a uniform index into each irreducible
/// power's solution set.
pub fn ff_sample_ideal(
    field: &FunctionField,
    n: u64,
    mode: FFMode,
    rng: &mut RandomSource,
) -> Result<(FFIdealFactorization, u64)> {
    let params = ff_derive_params(field, n, mode)?;
    ff_sample_ideal_with_params(&params, rng)
}

/// `ff_sample_ideal` against prebuilt params — the loop-friendly entry point.
pub fn ff_sample_ideal_with_params(
    params: &FFSamplerParams,
    rng: &mut RandomSource,
) -> Result<(FFIdealFactorization, u64)> {
    let (norm, trials) = ff_sample_norm(params, rng)?;
    let mut entries = Vec::new();
    let mut split_source = RandomSource::from_seed(SPLIT_SEED);
    for (pi, e) in norm.factors() {
        let split = ff_split(&params.field, pi, &mut split_source)?;
        let f_res = split.primes_above.iter().map(|x| x.f).collect();
        let table = SolutionTable::build_from_degrees(f_res, *e);
        let index = rng.uniform_below(table.count())?;
        let tuple = table.unrank(&index)?;
        for (q, c) in split.primes_above.iter().zip(tuple) {
            if c > 0 {
                entries.push(FFIdealFactorEntry {
                    pi: pi.clone(),
                    generator: q.generator.clone(),
                    e_ram: q.e,
                    f_res: q.f,
                    exponent: c,
                });
            }
        }
    }
    Ok((
        FFIdealFactorization {
            field_label: params.field.label().to_string(),
            entries,
            norm,
        },
        trials,
    ))
}

/// Every ideal whose norm lies in the mode's support, exactly once, unit
/// ideal included. Requires q^{N+1} within table range.
pub fn ff_enumerate_ideals(
    field: &FunctionField,
    n: u64,
    mode: FFMode,
) -> Result<Vec<FFIdealFactorization>> {
    let params = ff_derive_params(field, n, mode)?;
    let ctx = params.fast.as_ref().ok_or_else(|| {
        Error::BadParameter(format!("enumeration needs q^(N+1) ≤ {FF_TABLE_LIMIT}"))
    })?;
    let q = field.base().modulus().clone();
    // one atom per prime ideal; cost multiplies into the budget (exact-degree
    // budgets are degrees turned multiplicative: Σ deg ≤ N ⟺ Π q^deg ≤ q^N)
    struct Atom {
        s: u64,
        pi: Poly<PrimeField>,
        factor: FFPrimeIdealFactor,
        prime_idx: usize,
        cost: BigUint,
    }
    let limit = match mode {
        FFMode::EncodingBounded => &params.bound - 1u32,
        FFMode::ExactDegree => q.pow(u32::try_from(n).unwrap()),
    };
    let mut split_source = RandomSource::from_seed(SPLIT_SEED);
    let mut atoms: Vec<Atom> = Vec::new();
    for s in 2..ctx.bound {
        if !ctx.eligible[s as usize] {
            continue;
        }
        let pi = decode(&BigUint::from(s), field.base());
        let split = ff_split(field, &pi, &mut split_source)?;
        for (prime_idx, fac) in split.primes_above.iter().enumerate() {
            let cost = match mode {
                FFMode::EncodingBounded => BigUint::from(s).pow(fac.f),
                FFMode::ExactDegree => q.pow(fac.f * ctx.deg[s as usize]),
            };
            if cost <= limit {
                atoms.push(Atom {
                    s,
                    pi: pi.clone(),
                    factor: fac.clone(),
                    prime_idx,
                    cost,
                });
            }
        }
    }
    atoms.sort_by(|a, b| a.cost.cmp(&b.cost).then(a.s.cmp(&b.s)));

    let mut out = Vec::new();
    let mut stack: Vec<(usize, u32)> = Vec::new();
    fn rec(
        atoms: &[Atom],
        field: &FunctionField,
        limit: &BigUint,
        min_idx: usize,
        cost: BigUint,
        stack: &mut Vec<(usize, u32)>,
        out: &mut Vec<FFIdealFactorization>,
    ) {
        let mut chosen: Vec<(usize, u32)> = stack.clone();
        chosen.sort_by(|a, b| {
            let (x, y) = (&atoms[a.0], &atoms[b.0]);
            x.s.cmp(&y.s).then(x.prime_idx.cmp(&y.prime_idx))
        });
        let entries: Vec<FFIdealFactorEntry> = chosen
            .iter()
            .map(|&(i, c)| FFIdealFactorEntry {
                pi: atoms[i].pi.clone(),
                generator: atoms[i].factor.generator.clone(),
                e_ram: atoms[i].factor.e,
                f_res: atoms[i].factor.f,
                exponent: c,
            })
            .collect();
        let mut norm_exps: Vec<(u64, u32)> = Vec::new();
        for &(i, c) in &chosen {
            let v = c * atoms[i].factor.f;
            match norm_exps.iter_mut().find(|(s, _)| *s == atoms[i].s) {
                Some((_, acc)) => *acc += v,
                None => norm_exps.push((atoms[i].s, v)),
            }
        }
        let norm = FFFactoredPoly::from_factors(
            field.base(),
            norm_exps
                .iter()
                .map(|&(s, v)| (decode(&BigUint::from(s), field.base()), v)),
        )
        .expect("atoms are monic irreducible");
        out.push(FFIdealFactorization {
            field_label: field.label().to_string(),
            entries,
            norm,
        });

        for i in min_idx..atoms.len() {
            let mut next = &cost * &atoms[i].cost;
            if next > *limit {
                break; // atoms sorted by cost: nothing later fits either
            }
            let mut c = 1u32;
            while next <= *limit {
                stack.push((i, c));
                rec(atoms, field, limit, i + 1, next.clone(), stack, out);
                stack.pop();
                next *= &atoms[i].cost;
                c += 1;
            }
        }
    }
    rec(
        &atoms,
        field,
        &limit,
        0,
        BigUint::one(),
        &mut stack,
        &mut out,
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// field description files

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonUint {
    Num(u64),
    Str(String),
}

impl JsonUint {
    fn to_biguint(&self) -> Result<BigUint> {
        match self {
            JsonUint::Num(v) => Ok(BigUint::from(*v)),
            JsonUint::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::BadFieldFile(format!("bad integer literal {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
struct FFFile {
    #[serde(default)]
    label: Option<String>,
    q: JsonUint,
    poly: Vec<Vec<JsonUint>>,
    #[serde(default)]
    overrides: HashMap<String, Vec<(u32, u32, Vec<JsonUint>)>>,
}

/// Parse a function-field description: `{"q", "poly" (array of coefficient
/// arrays in t, one per power of y, lowest first), "overrides": {"n(π)":
/// [[e, f, [encoded gen coeffs]], ...]}}` plus an optional label.
pub fn ff_from_json(text: &str) -> Result<FunctionField> {
    let file: FFFile = serde_json::from_str(text)?;
    let q = file.q.to_biguint()?;
    let poly = file
        .poly
        .iter()
        .map(|c| c.iter().map(|v| v.to_biguint()).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut overrides = Vec::new();
    for (pi_str, entries) in file.overrides {
        let pi: BigUint = pi_str
            .trim()
            .parse()
            .map_err(|_| Error::BadFieldFile(format!("bad override key {pi_str:?}")))?;
        let entries = entries
            .into_iter()
            .map(|(e, f, gen)| {
                let gen = gen
                    .iter()
                    .map(|c| c.to_biguint())
                    .collect::<Result<Vec<_>>>()?;
                Ok((e, f, gen))
            })
            .collect::<Result<Vec<_>>>()?;
        overrides.push(FFOverrideSpec { pi, entries });
    }
    make_function_field(file.label.as_deref(), &q, poly, overrides)
}

pub fn ff_from_file(path: &std::path::Path) -> Result<FunctionField> {
    ff_from_json(&std::fs::read_to_string(path)?)
}
