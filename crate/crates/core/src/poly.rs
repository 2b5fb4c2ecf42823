//! Univariate polynomial arithmetic over finite fields.
//!
//! Everything is generic over [`Field`] so the same code factors `f(x)` over
//! a prime field F_p and over a residue field F_q[t]/(π). Polynomials store
//! their field handle; coefficients are kept reduced and trailing zeros are
//! trimmed, so equal polynomials compare equal structurally.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::rng::RandomSource;
use crate::{Error, Result};

pub trait Field: Clone + PartialEq + Eq + std::fmt::Debug {
    type Elem: Clone + PartialEq + Eq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; caller guarantees `a != 0`.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn characteristic(&self) -> BigUint;
    /// Number of elements, `p^k`.
    fn order(&self) -> BigUint;
    /// p-th root (inverse Frobenius); total since Frobenius is bijective.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem;
    fn random_elem(&self, rng: &mut RandomSource) -> Self::Elem;
    /// Bijection onto `[0, order)`, used for canonical sorting and for the
    /// digit encodings of the function-field sampler.
    fn index(&self, a: &Self::Elem) -> BigUint;
    fn from_index(&self, i: &BigUint) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, exp: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        if exp.is_zero() {
            return acc;
        }
        let bits = exp.bits();
        for j in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if exp.bit(j) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }
}

/// The prime field F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeField {
    p: BigUint,
}

impl PrimeField {
    /// Caller attests that `p` is prime (checked upstream where inputs are
    /// untrusted).
    pub fn new(p: BigUint) -> Self {
        debug_assert!(p >= BigUint::from(2u32));
        PrimeField { p }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }
}

impl Field for PrimeField {
    type Elem = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.p {
            s - &self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            a + &self.p - b
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.p - a
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.p
    }
    fn inv(&self, a: &BigUint) -> BigUint {
        debug_assert!(!a.is_zero());
        a.modpow(&(&self.p - 2u32), &self.p)
    }
    fn characteristic(&self) -> BigUint {
        self.p.clone()
    }
    fn order(&self) -> BigUint {
        self.p.clone()
    }
    fn pth_root(&self, a: &BigUint) -> BigUint {
        a.clone() // Frobenius is the identity on F_p
    }
    fn random_elem(&self, rng: &mut RandomSource) -> BigUint {
        rng.uniform_below(&self.p).unwrap()
    }
    fn index(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn from_index(&self, i: &BigUint) -> BigUint {
        i % &self.p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>, // lowest degree first, no trailing zeros
}

impl<F: Field> Poly<F> {
    pub fn from_coeffs(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: F) -> Self {
        let c = field.one();
        Poly {
            field,
            coeffs: vec![c],
        }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// The monomial x.
    pub fn x(field: F) -> Self {
        let coeffs = vec![field.zero(), field.one()];
        Poly { field, coeffs }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| *c == self.field.one())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    fn check_same_field(&self, other: &Self) {
        assert!(
            self.field == other.field,
            "polynomials live over different fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.add(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::from_coeffs(self.field.clone(), coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.field.sub(&self.coeff(i), &other.coeff(i)))
            .collect();
        Self::from_coeffs(self.field.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field.clone());
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = self.field.mul(a, b);
                coeffs[i + j] = self.field.add(&coeffs[i + j], &t);
            }
        }
        Self::from_coeffs(self.field.clone(), coeffs)
    }

    pub fn mul_scalar(&self, s: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.mul(c, s)).collect();
        Self::from_coeffs(self.field.clone(), coeffs)
    }

    /// Scale to leading coefficient 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lc) if *lc == self.field.one() => self.clone(),
            Some(lc) => self.mul_scalar(&self.field.inv(lc)),
        }
    }

    /// Long division; errors only on a zero divisor.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check_same_field(divisor);
        let d = divisor.degree().ok_or(Error::DivisionByZero)?;
        let field = self.field.clone();
        if self.degree().map_or(true, |n| n < d) {
            return Ok((Self::zero(field), self.clone()));
        }
        let lc_inv = field.inv(divisor.leading().unwrap());
        let n = self.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![field.zero(); n - d + 1];
        for i in (d..=n).rev() {
            if field.is_zero(&rem[i]) {
                continue;
            }
            let q = field.mul(&rem[i], &lc_inv);
            for j in 0..d {
                let t = field.mul(&q, &divisor.coeffs[j]);
                rem[i - d + j] = field.sub(&rem[i - d + j], &t);
            }
            rem[i] = field.zero();
            quot[i - d] = q;
        }
        Ok((
            Self::from_coeffs(field.clone(), quot),
            Self::from_coeffs(field, rem),
        ))
    }

    pub fn rem(&self, modulus: &Self) -> Result<Self> {
        Ok(self.divrem(modulus)?.1)
    }

    /// Exact quotient (remainder is asserted to vanish).
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.divrem(divisor)?;
        debug_assert!(r.is_zero(), "division was not exact");
        Ok(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns (g, s) with `s·self ≡ g (mod other)`,
    /// g monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self) {
        let field = self.field.clone();
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Self::one(field.clone());
        let mut s1 = Self::zero(field.clone());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        match r0.leading() {
            None => (r0, s0),
            Some(lc) => {
                let inv = field.inv(lc);
                (r0.mul_scalar(&inv), s0.mul_scalar(&inv))
            }
        }
    }

    /// `self^exp mod modulus` by square-and-multiply.
    pub fn powmod(&self, exp: &BigUint, modulus: &Self) -> Result<Self> {
        let field = self.field.clone();
        let base = self.rem(modulus)?;
        let mut acc = Self::one(field).rem(modulus)?;
        if exp.is_zero() {
            return Ok(acc);
        }
        for j in (0..exp.bits()).rev() {
            acc = acc.mul(&acc).rem(modulus)?;
            if exp.bit(j) {
                acc = acc.mul(&base).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let field = self.field.clone();
        let ch = field.characteristic();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let scalar = field.from_index(&(BigUint::from(i) % &ch));
                field.mul(c, &scalar)
            })
            .collect();
        Self::from_coeffs(field, coeffs)
    }

    pub fn eval(&self, at: &F::Elem) -> F::Elem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = self.field.add(&self.field.mul(&acc, at), c);
        }
        acc
    }

    /// Uniformly random polynomial of degree strictly below `deg_bound`.
    pub fn random_below_degree(field: F, deg_bound: usize, rng: &mut RandomSource) -> Self {
        let coeffs = (0..deg_bound).map(|_| field.random_elem(rng)).collect();
        Self::from_coeffs(field, coeffs)
    }

    /// Substitute every coefficient by its p-th root; inverts `g(x) -> g(x^p)`
    /// for polynomials supported on multiples of p.
    pub fn pth_root_poly(&self) -> Self {
        let field = self.field.clone();
        let p = field
            .characteristic()
            .to_usize()
            .expect("characteristic fits usize for p-th root extraction");
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| field.pth_root(c))
            .collect();
        Self::from_coeffs(field, coeffs)
    }

    /// Total order for canonical sorting: by degree, then coefficients from
    /// the top down via the field's index map.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let da = self.coeffs.len();
        let db = other.coeffs.len();
        if da != db {
            return da.cmp(&db);
        }
        for i in (0..da).rev() {
            let ka = self.field.index(&self.coeffs[i]);
            let kb = self.field.index(&other.coeffs[i]);
            match ka.cmp(&kb) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Render with the given variable name; coefficients display as their
    /// field index. Residue-field coefficients are parenthesized by the
    /// caller's field implementing a multi-digit index.
    pub fn render(&self, var: &str, show: impl Fn(&F::Elem) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let one = self.field.one();
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.field.is_zero(c) {
                continue;
            }
            let coeff = show(c);
            let part = match i {
                0 => coeff,
                _ => {
                    let xpow = if i == 1 {
                        var.to_string()
                    } else {
                        format!("{var}^{i}")
                    };
                    if *c == one {
                        xpow
                    } else {
                        format!("{coeff}*{xpow}")
                    }
                }
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

/// The spec-level dispatch entry point over prime fields; checks field
/// agreement up front instead of panicking.
pub enum PolyOp {
    Add,
    Mul,
    Mod,
    Gcd,
}

pub fn poly_arith(a: &Poly<PrimeField>, b: &Poly<PrimeField>, op: PolyOp) -> Result<Poly<PrimeField>> {
    if a.field() != b.field() {
        return Err(Error::MismatchedField);
    }
    match op {
        PolyOp::Add => Ok(a.add(b)),
        PolyOp::Mul => Ok(a.mul(b)),
        PolyOp::Mod => a.rem(b),
        PolyOp::Gcd => Ok(a.gcd(b)),
    }
}

/// The residue field F_p[t]/(π). Elements are polynomials in t of degree
/// below deg π, reduced mod π.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    base: PrimeField,
    modulus: Poly<PrimeField>,
}

impl ResidueField {
    /// `modulus` must be irreducible over its prime field; checked by the
    /// callers that construct residue fields from untrusted input.
    pub fn new(modulus: Poly<PrimeField>) -> Self {
        let modulus = modulus.monic();
        ResidueField {
            base: modulus.field().clone(),
            modulus,
        }
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn modulus(&self) -> &Poly<PrimeField> {
        &self.modulus
    }

    pub fn extension_degree(&self) -> usize {
        self.modulus.degree().expect("nonzero modulus")
    }

    pub fn embed(&self, a: &Poly<PrimeField>) -> Poly<PrimeField> {
        a.rem(&self.modulus).expect("nonzero modulus")
    }
}

impl Field for ResidueField {
    type Elem = Poly<PrimeField>;

    fn zero(&self) -> Self::Elem {
        Poly::zero(self.base.clone())
    }
    fn one(&self) -> Self::Elem {
        Poly::one(self.base.clone())
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.add(b)
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.sub(b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.neg()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.mul(b).rem(&self.modulus).expect("nonzero modulus")
    }
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        debug_assert!(!a.is_zero());
        let (g, s) = a.ext_gcd(&self.modulus);
        debug_assert!(g.is_one(), "modulus not irreducible or element not a unit");
        s.rem(&self.modulus).expect("nonzero modulus")
    }
    fn characteristic(&self) -> BigUint {
        self.base.modulus().clone()
    }
    fn order(&self) -> BigUint {
        self.base
            .modulus()
            .pow(self.extension_degree() as u32)
    }
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        // Frobenius has order k, so its inverse is x -> x^(p^(k-1))
        let k = self.extension_degree() as u32;
        if k == 1 {
            return a.clone();
        }
        let exp = self.base.modulus().pow(k - 1);
        self.pow(a, &exp)
    }
    fn random_elem(&self, rng: &mut RandomSource) -> Self::Elem {
        Poly::random_below_degree(self.base.clone(), self.extension_degree(), rng)
    }
    fn index(&self, a: &Self::Elem) -> BigUint {
        let p = self.base.modulus();
        let mut acc = BigUint::zero();
        for i in (0..self.extension_degree()).rev() {
            acc = acc * p + a.coeff(i);
        }
        acc
    }
    fn from_index(&self, i: &BigUint) -> Self::Elem {
        let p = self.base.modulus();
        let mut rest = i.clone();
        let mut coeffs = Vec::with_capacity(self.extension_degree());
        for _ in 0..self.extension_degree() {
            coeffs.push(&rest % p);
            rest /= p;
        }
        Poly::from_coeffs(self.base.clone(), coeffs)
    }
}
