//! The norm sampler: rejection sampling of ideal norms.
//!
//! One Kalai-style chain per odd residue class b mod m produces each prime
//! p ≡ b with an independent geometric occurrence law of ratio
//! m/(p − p̄ + 1); primes p ≤ m get direct geometric draws. The product r
//! of the retained primes then carries a closed-form candidate law, and a
//! Bernoulli acceptance of M(r)·ψ(r)·D(r)/(m^Ω·N) reshapes that law into
//! P(r) ∝ D(r), the number of ideals of norm r. Unranking a uniform index
//! into each prime's solution table finishes the job: a uniformly random
//! ideal of norm ≤ N, in fully factored form.
//!
//! `generate_candidate` is the faithful reference generator (full chains,
//! full trace); `sample_norm` runs a lean engine that abandons a round as
//! soon as the running product exceeds N. Such a round is rejected no
//! matter what the remaining draws would have said, and nothing ever looks
//! at them, so the output law and the trial counts are unchanged.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{binomial_coeff, is_prime_u64, is_probable_prime};
use crate::factored::FactoredInteger;
use crate::ideals::{count_prime_power, IdealFactorEntry, IdealFactorization, SolutionTable};
use crate::number_field::{split_prime, NumberField};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// A chain this long means the continuation law broke.
const CHAIN_STEP_LIMIT: u64 = 1_000_000;
/// Rejection-loop guard.
const TRIAL_LIMIT: u64 = 100_000_000;
/// Bound up to which primality is sieved in advance (and up to which the
/// exact candidate-law tail product is considered tractable).
const SIEVE_LIMIT: u64 = 1 << 24;
/// Polynomial factorization returns canonically sorted factors whatever the
/// internal random choices, so splitting can run off a fixed-seed source.
/// That keeps the sampling stream independent of cache state.
const SPLIT_SEED: u64 = 0x5EED_1DEA;

/// Everything sampling needs that depends only on (field, N): residue
/// classes, chain caps, the damping constant α, and lazily built caches.
pub struct SamplerParams {
    field: NumberField,
    n: BigUint,
    /// d for even degree d, 2d for odd d: always even, so every prime above
    /// it falls in one of the odd residue classes.
    modulus: u64,
    /// Odd residues 1, 3, …, modulus−1; one chain per class.
    residues: Vec<u64>,
    /// k_b = ⌊(N−b)/modulus⌋ per residue: the largest chain multiplier.
    caps: Vec<BigUint>,
    /// ⌊log₂ N⌋, the exponent cap used by the acceptance bound.
    l: u64,
    /// 1/binom(d+L−1, L), the per-small-prime damping factor.
    alpha: BigRational,
    /// Primes ≤ modulus, drawn directly rather than through chains.
    small_primes: Vec<u64>,
    warning: Option<String>,
    fast: Option<FastCtx>,
    z_tail: OnceLock<BigRational>,
    dcache: Mutex<HashMap<(u64, u32), BigUint>>,
}

/// Machine-word mirror of the chain parameters, present when N < 2^64.
struct FastCtx {
    n: u64,
    caps: Vec<u64>,
    /// Primality by table lookup when N ≤ SIEVE_LIMIT.
    sieve: Option<Vec<bool>>,
    /// binom(d+L−1, L)^#small_primes for the acceptance denominator,
    /// when it fits a double word.
    alpha_den_pow: Option<u128>,
}

impl SamplerParams {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
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

    pub fn small_primes(&self) -> &[u64] {
        &self.small_primes
    }

    /// Set when 2^degree ≥ N, where acceptance rates collapse.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }
}

pub fn derive_params(field: &NumberField, n: &BigUint) -> Result<SamplerParams> {
    if n.is_zero() {
        return Err(Error::BadParameter("norm bound must be at least 1".into()));
    }
    let d = field.degree() as u64;
    let modulus = if d % 2 == 0 { d } else { 2 * d };
    let residues: Vec<u64> = (1..modulus).step_by(2).collect();
    let l = n.bits() - 1;
    let binom = binomial_coeff(d + l - 1, l)?;
    let alpha = BigRational::new(BigInt::one(), BigInt::from(binom.clone()));
    let small_primes: Vec<u64> = (2..=modulus).filter(|&p| is_prime_u64(p)).collect();
    let caps: Vec<BigUint> = residues
        .iter()
        .map(|&b| {
            if *n >= BigUint::from(b) {
                (n - b) / modulus
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let warning = ((BigUint::one() << d) >= *n).then(|| {
        format!("degree {d} is at least log2 of the bound; expect very low acceptance rates")
    });
    let fast = n.to_u64().map(|n64| {
        let caps = residues
            .iter()
            .map(|&b| if n64 >= b { (n64 - b) / modulus } else { 0 })
            .collect();
        let sieve = (n64 <= SIEVE_LIMIT).then(|| prime_sieve(n64));
        let alpha_den_pow = binom
            .to_u128()
            .and_then(|b| (0..small_primes.len()).try_fold(1u128, |acc, _| acc.checked_mul(b)));
        FastCtx {
            n: n64,
            caps,
            sieve,
            alpha_den_pow,
        }
    });
    Ok(SamplerParams {
        field: field.clone(),
        n: n.clone(),
        modulus,
        residues,
        caps,
        l,
        alpha,
        small_primes,
        warning,
        fast,
        z_tail: OnceLock::new(),
        dcache: Mutex::new(HashMap::new()),
    })
}

fn prime_sieve(n: u64) -> Vec<bool> {
    let n = n as usize;
    let mut s = vec![true; n + 1];
    s[0] = false;
    if n >= 1 {
        s[1] = false;
    }
    let mut p = 2usize;
    while p * p <= n {
        if s[p] {
            let mut q = p * p;
            while q <= n {
                s[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    s
}

/// One chain draw: 1 with weight 1, each of k·modulus-class elements with
/// weight m. Covers both the head (k = cap) and the continuation from s
/// (k = (s−b)/m), whose total weight s−b+1 matches the chain law.
pub(crate) fn chain_step_big(k: &BigUint, m: u64, b: u64, rng: &mut RandomSource) -> Result<BigUint> {
    let span = k * m + 1u32;
    let u = rng.uniform_below(&span)?;
    Ok(if u.is_zero() {
        BigUint::one()
    } else {
        ((u - 1u32) / m + 1u32) * m + b
    })
}

#[inline]
pub(crate) fn chain_step_fast(k: u64, m: u64, b: u64, rng: &mut RandomSource) -> u64 {
    let u = rng.uniform_below_u64(k * m + 1);
    if u == 0 {
        1
    } else {
        ((u - 1) / m + 1) * m + b
    }
}

/// Full record of one candidate round.
#[derive(Debug, Clone)]
pub struct CandidateTrace {
    /// One (residue, sequence) pair per class; sequences are non-increasing
    /// within the class and end at the terminal 1.
    pub chains: Vec<(u64, Vec<BigUint>)>,
    /// (p, exponent) per prime ≤ modulus, zero exponents included.
    pub small_exponents: Vec<(u64, u32)>,
    /// Product of all retained primes, with multiplicity.
    pub candidate: FactoredInteger,
}

/// Faithful candidate generator: full per-class chains (prime values are
/// retained with multiplicity), then geometric draws for primes ≤ modulus.
pub fn generate_candidate(
    params: &SamplerParams,
    rng: &mut RandomSource,
) -> Result<CandidateTrace> {
    let m = params.modulus;
    let mut candidate = FactoredInteger::one();
    let mut chains = Vec::with_capacity(params.residues.len());
    for (i, &b) in params.residues.iter().enumerate() {
        let mut seq = Vec::new();
        let mut s = chain_step_big(&params.caps[i], m, b, rng)?;
        let mut steps = 0u64;
        loop {
            seq.push(s.clone());
            if s.is_one() {
                break;
            }
            if is_probable_prime(&s, 64, rng) {
                candidate.push_prime(&s, 1);
            }
            steps += 1;
            if steps >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(steps));
            }
            let k = (&s - b) / m;
            s = chain_step_big(&k, m, b, rng)?;
        }
        chains.push((b, seq));
    }
    let mut small_exponents = Vec::with_capacity(params.small_primes.len());
    for &p in &params.small_primes {
        let mut e = 0u32;
        while rng.bernoulli_exact_u64(p - 1, p) {
            e += 1;
            if e as u64 >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(e as u64));
            }
        }
        if e > 0 {
            candidate.push_prime(&BigUint::from(p), e);
        }
        small_exponents.push((p, e));
    }
    Ok(CandidateTrace {
        chains,
        small_exponents,
        candidate,
    })
}

/// ψ(r): each prime factor above the modulus replaced by p − p̄ + 1, where
/// p̄ is its residue class label; small prime factors stay. ψ(r) ≤ r.
pub fn psi(r: &FactoredInteger, modulus: u64, residues: &[u64]) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (p, e) in r.factors() {
        if p.to_u64().is_some_and(|v| v <= modulus) {
            acc *= p.pow(*e);
        } else {
            let pbar = (p % modulus).to_u64().unwrap();
            if !residues.contains(&pbar) {
                return Err(Error::BadParameter(format!(
                    "prime {p} lies in residue class {pbar} mod {modulus}, outside every list"
                )));
            }
            acc *= (p - pbar + 1u32).pow(*e);
        }
    }
    Ok(acc)
}

/// Prime factors above the modulus, counted with multiplicity.
fn omega_above_modulus(r: &FactoredInteger, modulus: u64) -> u64 {
    r.factors()
        .iter()
        .filter(|(p, _)| p.to_u64().map_or(true, |v| v > modulus))
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

/// Π over primes modulus < p ≤ N of (1 − m/(p − p̄ + 1)): the probability
/// that no chain retains p. Accumulated as one numerator/denominator pair,
/// with a single reduction at the end instead of ~π(N) intermediate gcds.
fn z_tail(params: &SamplerParams) -> Result<&BigRational> {
    let within_sieve = params
        .fast
        .as_ref()
        .is_some_and(|ctx| ctx.n <= SIEVE_LIMIT);
    if !within_sieve {
        return Err(Error::BadParameter(format!(
            "exact candidate probabilities need N ≤ {SIEVE_LIMIT}"
        )));
    }
    let ctx = params.fast.as_ref().unwrap();
    Ok(params.z_tail.get_or_init(|| {
        let m = params.modulus;
        let sieve = ctx.sieve.as_ref().unwrap();
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for p in (m + 1)..=ctx.n {
            if !sieve[p as usize] {
                continue;
            }
            let w = p - p % m + 1;
            num *= w - m;
            den *= w;
        }
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }))
}

/// Exact probability that `generate_candidate` outputs r: geometric weights
/// for the small primes, occurrence ratios for the chain primes, and the
/// non-occurrence tail over every other prime ≤ N.
pub fn candidate_probability(params: &SamplerParams, r: &FactoredInteger) -> Result<BigRational> {
    if r.value() > &params.n {
        return Err(Error::BadParameter(format!(
            "r = {} exceeds the norm bound {}",
            r.value(),
            params.n
        )));
    }
    let m = params.modulus;
    let mut prob = z_tail(params)?.clone();
    for &p in &params.small_primes {
        let v = r.exponent_of(&BigUint::from(p));
        prob *= rat_pow(
            &BigRational::new(BigInt::from(p - 1), BigInt::from(p)),
            v,
        );
        prob /= BigInt::from(p);
    }
    // m^Ω / ψ(r) · Π_{p ≤ m} p^{v_p} = Π_{p > m} (m/(p−p̄+1))^{v_p}
    let omega = u32::try_from(omega_above_modulus(r, m))
        .map_err(|_| Error::BadParameter("exponent overflow".into()))?;
    let psi_val = psi(r, m, &params.residues)?;
    let mut num = BigUint::from(m).pow(omega);
    for &p in &params.small_primes {
        num *= BigUint::from(p).pow(r.exponent_of(&BigUint::from(p)));
    }
    prob *= BigRational::new(BigInt::from(num), BigInt::from(psi_val));
    Ok(prob)
}

/// D(p^e) through the params-local count cache; the splitting itself is
/// cached on the field.
fn count_prime_power_cached(params: &SamplerParams, p: &BigUint, e: u32) -> Result<BigUint> {
    let key = p.to_u64().map(|p64| (p64, e));
    if let Some(k) = key {
        if let Some(hit) = params.dcache.lock().unwrap().get(&k) {
            return Ok(hit.clone());
        }
    }
    let mut source = RandomSource::from_seed(SPLIT_SEED);
    let split = split_prime(&params.field, p, &mut source)?;
    let count = count_prime_power(&split, e);
    if let Some(k) = key {
        params.dcache.lock().unwrap().insert(k, count.clone());
    }
    Ok(count)
}

fn count_norm_cached(params: &SamplerParams, r: &FactoredInteger) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (p, e) in r.factors() {
        acc *= count_prime_power_cached(params, p, *e)?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// The Bernoulli weight M(r)·ψ(r)·D(r)/(m^Ω·N) that tilts the candidate
/// law into P(r) ∝ D(r), with M(r) = Π_{p ≤ m prime} α·(1/(p−1))^{v_p}.
/// Exactly 0 when D(r) = 0; always within [0, 1].
pub fn acceptance_probability(params: &SamplerParams, r: &FactoredInteger) -> Result<BigRational> {
    if r.value() > &params.n {
        return Err(Error::BadParameter(format!(
            "r = {} exceeds the norm bound {}",
            r.value(),
            params.n
        )));
    }
    let d_count = count_norm_cached(params, r)?;
    acceptance_with_count(params, r, &d_count)
}

fn acceptance_with_count(
    params: &SamplerParams,
    r: &FactoredInteger,
    d_count: &BigUint,
) -> Result<BigRational> {
    if d_count.is_zero() {
        return Ok(BigRational::zero());
    }
    let m = params.modulus;
    let omega = u32::try_from(omega_above_modulus(r, m))
        .map_err(|_| Error::BadParameter("exponent overflow".into()))?;
    let num = psi(r, m, &params.residues)? * d_count;
    let mut den = BigUint::from(m).pow(omega) * &params.n;
    let binom = params.alpha.denom().magnitude();
    for &p in &params.small_primes {
        den *= binom;
        den *= BigUint::from(p - 1).pow(r.exponent_of(&BigUint::from(p)));
    }
    debug_assert!(num <= den);
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

#[inline]
fn fast_is_prime(ctx: &FastCtx, v: u64) -> bool {
    match &ctx.sieve {
        Some(s) => s[v as usize],
        None => is_prime_u64(v),
    }
}

/// One candidate round on machine words, writing the factored candidate
/// into `parts` (unsorted). Returns false the moment the running product
/// exceeds N, skipping the rest of the round's draws.
fn run_trial_fast(
    params: &SamplerParams,
    ctx: &FastCtx,
    rng: &mut RandomSource,
    parts: &mut Vec<(u64, u32)>,
) -> Result<bool> {
    parts.clear();
    let m = params.modulus;
    let n = ctx.n as u128;
    let mut product: u128 = 1;
    for (i, &b) in params.residues.iter().enumerate() {
        let mut s = chain_step_fast(ctx.caps[i], m, b, rng);
        let mut steps = 0u64;
        while s != 1 {
            if fast_is_prime(ctx, s) {
                product *= s as u128;
                if product > n {
                    return Ok(false);
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
            s = chain_step_fast((s - b) / m, m, b, rng);
        }
    }
    for &p in &params.small_primes {
        let mut e = 0u32;
        while rng.bernoulli_exact_u64(p - 1, p) {
            e += 1;
            product *= p as u128;
            if product > n {
                return Ok(false);
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

/// Big-integer mirror of `run_trial_fast`: identical draws and identical
/// abandonment points for the same stream.
fn run_trial_wide(
    params: &SamplerParams,
    rng: &mut RandomSource,
) -> Result<Option<FactoredInteger>> {
    let m = params.modulus;
    let mut r = FactoredInteger::one();
    for (i, &b) in params.residues.iter().enumerate() {
        let mut s = chain_step_big(&params.caps[i], m, b, rng)?;
        let mut steps = 0u64;
        while !s.is_one() {
            if is_probable_prime(&s, 64, rng) {
                r.push_prime(&s, 1);
                if r.value() > &params.n {
                    return Ok(None);
                }
            }
            steps += 1;
            if steps >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(steps));
            }
            let k = (&s - b) / m;
            s = chain_step_big(&k, m, b, rng)?;
        }
    }
    for &p in &params.small_primes {
        let mut e = 0u32;
        let mut value = r.value().clone();
        while rng.bernoulli_exact_u64(p - 1, p) {
            e += 1;
            value *= p;
            if value > params.n {
                return Ok(None);
            }
            if e as u64 >= CHAIN_STEP_LIMIT {
                return Err(Error::SamplerStalled(e as u64));
            }
        }
        if e > 0 {
            r.push_prime(&BigUint::from(p), e);
        }
    }
    Ok(Some(r))
}

/// u128 build of the acceptance fraction for the hot loop; None on overflow
/// (the exact big-rational route then draws the same stream).
fn fast_acceptance_fraction(
    params: &SamplerParams,
    ctx: &FastCtx,
    parts: &[(u64, u32)],
    d_count: &BigUint,
) -> Option<(u128, u128)> {
    let m = params.modulus as u128;
    let mut num = d_count.to_u128()?;
    let mut den = (ctx.n as u128).checked_mul(ctx.alpha_den_pow?)?;
    for &(p, e) in parts {
        if p <= params.modulus {
            num = num.checked_mul((p as u128).checked_pow(e)?)?;
            den = den.checked_mul(((p - 1) as u128).checked_pow(e)?)?;
        } else {
            let w = (p - p % params.modulus + 1) as u128;
            num = num.checked_mul(w.checked_pow(e)?)?;
            den = den.checked_mul(m.checked_pow(e)?)?;
        }
    }
    Some((num, den))
}

fn factored_from_parts(parts: &[(u64, u32)]) -> FactoredInteger {
    FactoredInteger::from_prime_powers(parts.iter().map(|&(p, e)| (BigUint::from(p), e)))
}

fn accept_fast(
    params: &SamplerParams,
    ctx: &FastCtx,
    parts: &[(u64, u32)],
    rng: &mut RandomSource,
) -> Result<Option<FactoredInteger>> {
    let mut d_count = BigUint::one();
    for &(p, e) in parts {
        d_count *= count_prime_power_cached(params, &BigUint::from(p), e)?;
        if d_count.is_zero() {
            // rejected for certain: no Bernoulli draw
            return Ok(None);
        }
    }
    let accepted = match fast_acceptance_fraction(params, ctx, parts, &d_count) {
        Some((num, den)) => rng.bernoulli_exact_u128(num, den),
        None => {
            let r = factored_from_parts(parts);
            rng.bernoulli_exact(&acceptance_with_count(params, &r, &d_count)?)?
        }
    };
    Ok(accepted.then(|| factored_from_parts(parts)))
}

/// Rejection loop: chain candidates, Bernoulli acceptance weighted by D(r).
/// Returns the accepted factored norm and the number of rounds consumed.
/// Conditional output law: P(r) = D(r)/Σ_{r′ ≤ N} D(r′).
pub fn sample_norm(
    params: &SamplerParams,
    rng: &mut RandomSource,
) -> Result<(FactoredInteger, u64)> {
    let mut trials = 0u64;
    let mut parts: Vec<(u64, u32)> = Vec::new();
    loop {
        trials += 1;
        if trials > TRIAL_LIMIT {
            return Err(Error::SamplerStalled(trials));
        }
        match &params.fast {
            Some(ctx) => {
                if !run_trial_fast(params, ctx, rng, &mut parts)? {
                    continue;
                }
                if let Some(r) = accept_fast(params, ctx, &parts, rng)? {
                    return Ok((r, trials));
                }
            }
            None => {
                let Some(r) = run_trial_wide(params, rng)? else {
                    continue;
                };
                let d_count = count_norm_cached(params, &r)?;
                if d_count.is_zero() {
                    continue;
                }
                let acc = acceptance_with_count(params, &r, &d_count)?;
                if rng.bernoulli_exact(&acc)? {
                    return Ok((r, trials));
                }
            }
        }
    }
}

/// Draw a uniformly random ideal of norm ≤ N: sample the norm, then unrank
/// a uniform index into each prime power's solution set.
pub fn sample_ideal(
    field: &NumberField,
    n: &BigUint,
    rng: &mut RandomSource,
) -> Result<(IdealFactorization, u64)> {
    let params = derive_params(field, n)?;
    sample_ideal_with_params(&params, rng)
}

/// `sample_ideal` against prebuilt params — the loop-friendly entry point.
pub fn sample_ideal_with_params(
    params: &SamplerParams,
    rng: &mut RandomSource,
) -> Result<(IdealFactorization, u64)> {
    let (norm, trials) = sample_norm(params, rng)?;
    let mut entries = Vec::new();
    let mut split_source = RandomSource::from_seed(SPLIT_SEED);
    for (p, e) in norm.factors() {
        let split = split_prime(&params.field, p, &mut split_source)?;
        let table = SolutionTable::build(&split, *e);
        let index = rng.uniform_below(table.count())?;
        let tuple = table.unrank(&index)?;
        for (q, c) in split.primes_above.iter().zip(tuple) {
            if c > 0 {
                entries.push(IdealFactorEntry {
                    p: p.clone(),
                    generator: q.generator.clone(),
                    e_ram: q.e,
                    f_res: q.f,
                    exponent: c,
                });
            }
        }
    }
    Ok((
        IdealFactorization {
            field_label: params.field.label().to_string(),
            entries,
            norm,
        },
        trials,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factored::factor_integer;
    use crate::number_field::make_field;

    fn field_x(coeffs: &[i64], label: &str) -> NumberField {
        make_field(
            label,
            coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            vec![],
            false,
        )
        .unwrap()
    }

    fn gaussian() -> NumberField {
        field_x(&[1, 0, 1], "Q(i)")
    }

    fn fi(n: u64) -> FactoredInteger {
        factor_integer(&BigUint::from(n)).unwrap()
    }

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn params_match_worked_examples() {
        let p = derive_params(&gaussian(), &BigUint::from(100u32)).unwrap();
        assert_eq!(p.modulus(), 2);
        assert_eq!(p.residues(), &[1]);
        assert_eq!(p.l(), 6);
        assert_eq!(p.alpha(), &rat(1, 7));
        assert_eq!(p.small_primes(), &[2]);
        assert_eq!(p.caps(), &[BigUint::from(49u32)]);
        assert!(p.warning().is_none());

        let quartic = field_x(&[2, 0, 0, 0, 1], "Q(2^(1/4))");
        let p = derive_params(&quartic, &BigUint::from(103u32)).unwrap();
        assert_eq!(p.modulus(), 4);
        assert_eq!(p.residues(), &[1, 3]);
        assert_eq!(p.small_primes(), &[2, 3]);
        assert_eq!(p.caps(), &[BigUint::from(25u32), BigUint::from(25u32)]);

        let cubic = field_x(&[-2, 0, 0, 1], "Q(2^(1/3))");
        let p = derive_params(&cubic, &BigUint::from(100u32)).unwrap();
        assert_eq!(p.modulus(), 6);
        assert_eq!(p.residues(), &[1, 3, 5]);
        assert_eq!(p.small_primes(), &[2, 3, 5]);
        assert_eq!(p.alpha(), &rat(1, 28)); // binom(8, 6)

        // warning exactly when 2^d ≥ N
        let g = gaussian();
        assert!(derive_params(&g, &BigUint::from(4u32))
            .unwrap()
            .warning()
            .is_some());
        assert!(derive_params(&g, &BigUint::from(5u32))
            .unwrap()
            .warning()
            .is_none());
        assert!(derive_params(&g, &BigUint::zero()).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&fi(15), 2, &[1]).unwrap(), BigUint::from(15u32));
        assert_eq!(psi(&fi(7), 4, &[1, 3]).unwrap(), BigUint::from(5u32));
        assert_eq!(psi(&fi(8), 4, &[1, 3]).unwrap(), BigUint::from(8u32));
        // uncovered class
        assert!(psi(&fi(7), 4, &[1]).is_err());
        // ψ(r) ≤ r and the Ω identity, across moduli
        for r in 1u64..=400 {
            let f = fi(r);
            for m in [2u64, 4, 6, 10] {
                let residues: Vec<u64> = (1..m).step_by(2).collect();
                let v = psi(&f, m, &residues).unwrap();
                assert!(v <= BigUint::from(r));
                let small: u64 = f
                    .factors()
                    .iter()
                    .filter(|(p, _)| p.to_u64().unwrap() <= m)
                    .map(|(_, e)| *e as u64)
                    .sum();
                assert_eq!(omega_above_modulus(&f, m) + small, f.omega());
            }
        }
    }

    #[test]
    fn candidate_probability_worked_examples() {
        let p = derive_params(&gaussian(), &BigUint::from(10u32)).unwrap();
        // (1/2)·(2/5)·(1/3)·(3/5)·(5/7) = 1/35
        assert_eq!(candidate_probability(&p, &fi(5)).unwrap(), rat(1, 35));
        // e = 0 everywhere: (1/2)·Z with Z = (1/3)(3/5)(5/7) = 1/7
        assert_eq!(
            candidate_probability(&p, &FactoredInteger::one()).unwrap(),
            rat(1, 14)
        );
        // 8 = 2³ keeps only the small-prime geometric part
        assert_eq!(candidate_probability(&p, &fi(8)).unwrap(), rat(1, 112));
        assert!(candidate_probability(&p, &fi(11)).is_err());
    }

    #[test]
    fn candidate_probabilities_sum_below_one() {
        let p = derive_params(&gaussian(), &BigUint::from(50u32)).unwrap();
        let mut total = BigRational::zero();
        for r in 1u64..=50 {
            total += candidate_probability(&p, &fi(r)).unwrap();
        }
        assert!(total < BigRational::one());
        assert!(total > BigRational::zero());
    }

    /// Exact Markov oracle for one chain: W[s][x] = P(product of retained
    /// primes equals x | chain just arrived at s), solved bottom-up in
    /// exact rationals, then mixed over the head draw.
    fn markov_list_law(m: u64, b: u64, cap: u64, xmax: usize) -> Vec<BigRational> {
        let states: Vec<u64> = (1..=cap).map(|j| j * m + b).collect();
        // w[0] is the terminal state 1; w[j] is states[j-1]
        let mut w = vec![vec![BigRational::zero(); xmax + 1]; states.len() + 1];
        w[0][1] = BigRational::one();
        for (ji, &s) in states.iter().enumerate() {
            let den = BigInt::from(s - b + 1);
            let to_one = BigRational::new(BigInt::one(), den.clone());
            let per_elem = BigRational::new(BigInt::from(m), den.clone());
            let t = if is_prime_u64(s) { s } else { 1 };
            for x in 1..=xmax {
                if x as u64 % t != 0 {
                    continue;
                }
                let y = x / t as usize;
                let mut acc = &to_one * &w[0][y];
                for j2 in 1..=ji {
                    acc += &per_elem * &w[j2][y];
                }
                if t == 1 {
                    // self-loop at the same x: solve W = acc + q·W
                    acc *= BigRational::new(den.clone(), BigInt::from(s - b + 1 - m));
                } else {
                    // self transition consumed a factor of s: y < x is done
                    acc += &per_elem * &w[ji + 1][y];
                }
                w[ji + 1][x] = acc;
            }
        }
        let head_den = BigInt::from(cap * m + 1);
        let mut law = vec![BigRational::zero(); xmax + 1];
        law[1] = BigRational::new(BigInt::one(), head_den.clone());
        for ji in 1..=states.len() {
            let weight = BigRational::new(BigInt::from(m), head_den.clone());
            for x in 1..=xmax {
                let contrib = &weight * &w[ji][x];
                law[x] += contrib;
            }
        }
        law
    }

    /// Closed form the sampler relies on: independent geometric occurrence
    /// per prime in the class, ratio m/(p−p̄+1).
    fn closed_list_law(m: u64, b: u64, cap: u64, x: u64) -> BigRational {
        let supported: Vec<u64> = (1..=cap)
            .map(|j| j * m + b)
            .filter(|&v| is_prime_u64(v))
            .collect();
        let mut prob = BigRational::one();
        let mut rest = x;
        for &p in &supported {
            let q = BigRational::new(BigInt::from(m), BigInt::from(p - b + 1));
            while rest % p == 0 {
                rest /= p;
                prob *= &q;
            }
            prob *= BigRational::one() - &q;
        }
        if rest != 1 {
            return BigRational::zero();
        }
        prob
    }

    #[test]
    fn chain_law_matches_exact_markov_oracle() {
        // m=2: every odd prime ≤ 29 is in the one class
        let law = markov_list_law(2, 1, 14, 1000);
        for x in 1u64..=1000 {
            assert_eq!(
                law[x as usize],
                closed_list_law(2, 1, 14, x),
                "m=2 list law mismatch at {x}"
            );
        }
        // m=6, b=3: every element is divisible by 3, nothing is ever
        // retained, so the product is 1 with certainty
        let law = markov_list_law(6, 3, 7, 300);
        assert_eq!(law[1], BigRational::one());
        for x in 2..=300usize {
            assert_eq!(law[x], BigRational::zero());
        }
        // m=6, b=5 has a genuine prime mix (11, 17, 23, 29, 41, 47)
        let law = markov_list_law(6, 5, 7, 600);
        for x in 1u64..=600 {
            assert_eq!(
                law[x as usize],
                closed_list_law(6, 5, 7, x),
                "m=6 list law mismatch at {x}"
            );
        }
    }

    #[test]
    fn candidate_probability_matches_markov_oracle() {
        // d=2, N=30: P(candidate = odd r) = P(v_2 = 0)·P(list emits r)
        let params = derive_params(&gaussian(), &BigUint::from(30u32)).unwrap();
        let law = markov_list_law(2, 1, 14, 29);
        for r in (1u64..=29).step_by(2) {
            assert_eq!(
                candidate_probability(&params, &fi(r)).unwrap(),
                rat(1, 2) * &law[r as usize],
                "library law disagrees with the Markov oracle at {r}"
            );
        }
        // and with a power of two mixed in: independent factors
        assert_eq!(
            candidate_probability(&params, &fi(4 * 5)).unwrap(),
            rat(1, 8) * &law[5]
        );

        // d=3 (m=6): three lists and three small primes combine
        let cubic = field_x(&[-2, 0, 0, 1], "Q(2^(1/3))");
        let params = derive_params(&cubic, &BigUint::from(50u32)).unwrap();
        let law1 = markov_list_law(6, 1, 8, 49);
        let law5 = markov_list_law(6, 5, 7, 49);
        let small = |v2: u32, v3: u32, v5: u32| {
            rat_pow(&rat(1, 2), v2)
                * rat(1, 2)
                * rat_pow(&rat(2, 3), v3)
                * rat(1, 3)
                * rat_pow(&rat(4, 5), v5)
                * rat(1, 5)
        };
        let check = |r: u64, v2: u32, v3: u32, v5: u32, c1: u64, c5: u64| {
            assert_eq!(
                candidate_probability(&params, &fi(r)).unwrap(),
                small(v2, v3, v5) * &law1[c1 as usize] * &law5[c5 as usize],
                "cubic candidate law mismatch at {r}"
            );
        };
        check(1, 0, 0, 0, 1, 1);
        check(7, 0, 0, 0, 7, 1);
        check(11, 0, 0, 0, 1, 11);
        check(35, 0, 0, 1, 7, 1);
        check(49, 0, 0, 0, 49, 1);
        check(33, 0, 1, 0, 1, 11);
        check(44, 2, 0, 0, 1, 11);
    }

    #[test]
    fn acceptance_worked_examples() {
        let p = derive_params(&gaussian(), &BigUint::from(100u32)).unwrap();
        assert_eq!(acceptance_probability(&p, &fi(5)).unwrap(), rat(1, 140));
        assert_eq!(
            acceptance_probability(&p, &FactoredInteger::one()).unwrap(),
            rat(1, 700)
        );
        assert_eq!(acceptance_probability(&p, &fi(3)).unwrap(), rat(0, 1));
        assert!(acceptance_probability(&p, &fi(101)).is_err());
        for r in 1u64..=100 {
            let a = acceptance_probability(&p, &fi(r)).unwrap();
            assert!(a >= BigRational::zero() && a <= BigRational::one());
        }
    }

    #[test]
    fn proportionality_is_exact() {
        // candidate·acceptance = c_N·D(r) with one constant — and the
        // constant itself is α^s·Z·Π_{p≤m}(1/p)/N
        for (field, n) in [
            (gaussian(), 60u64),
            (field_x(&[5, 0, 1], "Q(sqrt(-5))"), 60u64),
            (field_x(&[-2, 0, 0, 1], "Q(2^(1/3))"), 40u64),
        ] {
            let params = derive_params(&field, &BigUint::from(n)).unwrap();
            let mut expected = z_tail(&params).unwrap().clone() / BigInt::from(n);
            for &p in params.small_primes() {
                expected *= params.alpha() / BigInt::from(p);
            }
            let mut rng = RandomSource::from_seed(7);
            for r in 1..=n {
                let f = fi(r);
                let d = crate::ideals::count_norm(&field, &f, &mut rng).unwrap();
                let product = candidate_probability(&params, &f).unwrap()
                    * acceptance_probability(&params, &f).unwrap();
                assert_eq!(
                    product,
                    &expected * BigRational::from(BigInt::from(d)),
                    "proportionality broke at r = {r} in {}",
                    field.label()
                );
            }
        }
    }

    #[test]
    fn trace_engine_and_lean_engines_agree() {
        let params = derive_params(&gaussian(), &BigUint::from(60u32)).unwrap();
        let ctx = params.fast.as_ref().unwrap();
        let mut parts = Vec::new();
        for seed in 0..500u64 {
            let trace = generate_candidate(&params, &mut RandomSource::from_seed(seed)).unwrap();
            let mut rng_f = RandomSource::from_seed(seed);
            let fast_done = run_trial_fast(&params, ctx, &mut rng_f, &mut parts).unwrap();
            let wide = run_trial_wide(&params, &mut RandomSource::from_seed(seed)).unwrap();
            if trace.candidate.value() <= params.n() {
                assert!(fast_done);
                assert_eq!(factored_from_parts(&parts), trace.candidate);
                assert_eq!(wide.as_ref(), Some(&trace.candidate));
            } else {
                assert!(!fast_done);
                assert!(wide.is_none());
            }
        }
    }

    #[test]
    fn traces_are_wellformed() {
        let params = derive_params(&field_x(&[-2, 0, 0, 1], "Q(2^(1/3))"), &BigUint::from(200u32))
            .unwrap();
        let mut rng = RandomSource::from_seed(3);
        for _ in 0..200 {
            let t = generate_candidate(&params, &mut rng).unwrap();
            let mut rebuilt = FactoredInteger::one();
            for (b, seq) in &t.chains {
                assert!(!seq.is_empty());
                assert!(seq.last().unwrap().is_one());
                for pair in seq.windows(2) {
                    assert!(pair[0] >= pair[1]);
                }
                for s in seq {
                    if !s.is_one() {
                        assert_eq!((s % params.modulus()).to_u64().unwrap(), *b);
                        if is_prime_u64(s.to_u64().unwrap()) {
                            rebuilt.push_prime(s, 1);
                        }
                    }
                }
            }
            for &(p, e) in &t.small_exponents {
                if e > 0 {
                    rebuilt.push_prime(&BigUint::from(p), e);
                }
            }
            assert_eq!(rebuilt, t.candidate);
        }
    }

    #[test]
    fn sample_norm_stays_within_bound_and_factors_check_out() {
        let params = derive_params(&gaussian(), &BigUint::from(100u32)).unwrap();
        let mut rng = RandomSource::from_seed(11);
        for _ in 0..300 {
            let (r, trials) = sample_norm(&params, &mut rng).unwrap();
            assert!(trials >= 1);
            assert!(r.value() <= params.n());
            let mut check = BigUint::one();
            for (p, e) in r.factors() {
                assert!(is_prime_u64(p.to_u64().unwrap()));
                check *= p.pow(*e);
            }
            assert_eq!(&check, r.value());
            // D(r) > 0: 3 mod 4 primes must appear to even exponents
            for (p, e) in r.factors() {
                if (p % 4u32).to_u64().unwrap() == 3 {
                    assert_eq!(e % 2, 0, "inert prime with odd exponent in {r}");
                }
            }
        }
    }

    #[test]
    fn sampled_ideals_are_valid() {
        let field = gaussian();
        let params = derive_params(&field, &BigUint::from(100u32)).unwrap();
        let mut rng = RandomSource::from_seed(21);
        let mut split_rng = RandomSource::from_seed(99);
        for _ in 0..200 {
            let (ideal, _) = sample_ideal_with_params(&params, &mut rng).unwrap();
            assert_eq!(ideal.field_label, "Q(i)");
            // recomputed norm from the entries equals the sampled norm
            let mut norm = BigUint::one();
            for e in &ideal.entries {
                assert!(e.exponent >= 1);
                norm *= e.p.pow(e.f_res * e.exponent);
                let split = split_prime(&field, &e.p, &mut split_rng).unwrap();
                assert!(split
                    .primes_above
                    .iter()
                    .any(|q| q.generator == e.generator && q.e == e.e_ram && q.f == e.f_res));
            }
            assert_eq!(&norm, ideal.norm.value());
        }
    }

    #[test]
    fn degenerate_field_means_every_norm_counts_once() {
        let rationals = field_x(&[0, 1], "Q");
        let params = derive_params(&rationals, &BigUint::from(50u32)).unwrap();
        for r in 1u64..=50 {
            let a = acceptance_probability(&params, &fi(r)).unwrap();
            assert!(a > BigRational::zero());
        }
        let mut rng = RandomSource::from_seed(5);
        let (ideal, _) = sample_ideal(&rationals, &BigUint::from(50u32), &mut rng).unwrap();
        // the ideal (r): one entry per prime, f = 1
        for e in &ideal.entries {
            assert_eq!(e.f_res, 1);
            assert_eq!(e.e_ram, 1);
        }
    }
}
