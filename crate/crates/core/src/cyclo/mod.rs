//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycloNum`] is an element of `Q(zeta_n)` stored as exact rational
//! coordinates over the power basis `1, zeta_n, ..., zeta_n^{phi(n)-1}`.
//! Every value is kept at its minimal conductor, so structural equality and
//! hashing coincide with field equality. Arithmetic between different
//! conductors goes through `Q(zeta_lcm)`.

mod lll;
pub mod poly;
pub mod roots;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("division by zero in Q(zeta_{n})")]
    DivisionByZero { n: u32 },
    #[error("conductor must be >= 1")]
    BadConductor,
    #[error("expected {expected} coefficients for conductor {n}, got {got}")]
    CoefficientCount { n: u32, expected: usize, got: usize },
    #[error("gauss_sum requires an odd prime p with p ≡ 3 (mod 4), got {p}")]
    GaussSumPrime { p: u32 },
    #[error("galois automorphism index {k} is not coprime to the conductor {n}")]
    GaloisIndex { k: u64, n: u32 },
    #[error("invalid rational coefficient: {0}")]
    BadRational(String),
}

// ============================================================================
// Per-conductor context: minimal polynomial, reduction rows, numeric circle.
// ============================================================================

pub(crate) struct CycloContext {
    pub n: u32,
    pub phi: usize,
    /// Coefficients `c_0..c_{phi-1}` of the n-th cyclotomic polynomial
    /// (the leading coefficient 1 is implicit).
    pub min_poly: Vec<BigInt>,
    /// Power-basis coordinates of `zeta^t` for `t` in `[phi, n)`.
    pub red_rows: Vec<Vec<BigInt>>,
    /// `zeta^j` as a complex double, `j` in `[0, n)`.
    pub unit: Vec<Complex64>,
    /// Descent steps to each maximal cyclotomic subfield `Q(zeta_{n/p})`.
    pub descents: Vec<Descent>,
    /// Cached embedding matrices `Q(zeta_d) -> Q(zeta_n)` keyed by `d`.
    embed_mats: Mutex<HashMap<u32, Arc<Vec<Vec<BigInt>>>>>,
}

pub(crate) struct Descent {
    pub target: u32,
    /// A generator of `Gal(Q(zeta_n)/Q(zeta_target))` as a unit mod n;
    /// `None` when that group is trivial and the descent always succeeds.
    pub generator: Option<u64>,
}

static CONTEXTS: Lazy<Mutex<HashMap<u32, Arc<CycloContext>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

static CYCLO_POLYS: Lazy<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Full coefficient vector (ascending, monic) of the n-th cyclotomic polynomial.
fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    if let Some(p) = CYCLO_POLYS.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d of n.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = poly_div_exact_int(&num, &phi_d);
        }
    }
    let arc = Arc::new(num);
    CYCLO_POLYS.lock().unwrap().insert(n, arc.clone());
    arc
}

/// Exact division of integer polynomials (divisor monic, remainder must vanish).
fn poly_div_exact_int(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    debug_assert!(den[dn].is_one());
    let mut rem = num.to_vec();
    let qd = rem.len() - 1 - dn;
    let mut q = vec![BigInt::zero(); qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dn].clone();
        if !c.is_zero() {
            for j in 0..dn {
                rem[i + j] -= &c * &den[j];
            }
            rem[i + dn] = BigInt::zero();
            q[i] = c;
        }
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()), "inexact polynomial division");
    q
}

pub(crate) fn context(n: u32) -> Arc<CycloContext> {
    assert!(n >= 1, "conductor must be >= 1");
    if let Some(c) = CONTEXTS.lock().unwrap().get(&n) {
        return c.clone();
    }
    let full = cyclotomic_poly(n);
    let phi = full.len() - 1;
    let min_poly: Vec<BigInt> = full[..phi].to_vec();
    let row_phi: Vec<BigInt> = min_poly.iter().map(|c| -c).collect();
    let mut red_rows = Vec::with_capacity(n as usize - phi);
    if (phi as u32) < n {
        red_rows.push(row_phi.clone());
        for _ in phi as u32 + 1..n {
            let prev = red_rows.last().unwrap();
            let mut next = vec![BigInt::zero(); phi];
            for j in 1..phi {
                next[j] = prev[j - 1].clone();
            }
            let top = prev[phi - 1].clone();
            if !top.is_zero() {
                for j in 0..phi {
                    next[j] += &top * &row_phi[j];
                }
            }
            red_rows.push(next);
        }
    }
    let unit: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .collect();
    let descents = build_descents(n);
    let ctx = Arc::new(CycloContext {
        n,
        phi,
        min_poly,
        red_rows,
        unit,
        descents,
        embed_mats: Mutex::new(HashMap::new()),
    });
    CONTEXTS.lock().unwrap().insert(n, ctx.clone());
    ctx
}

fn build_descents(n: u32) -> Vec<Descent> {
    let mut out = Vec::new();
    for p in arith::prime_divisors(n as u64) {
        let p = p as u32;
        let d = n / p;
        let trivial = arith::euler_phi(n as u64) == arith::euler_phi(d as u64);
        let generator = if trivial {
            None
        } else if d % p == 0 {
            // p^2 | n: Gal(n -> n/p) is cyclic generated by 1 + n/p.
            Some(1 + d as u64)
        } else {
            // p || n (p odd here): isomorphic to (Z/p)^*, generator by CRT.
            let g = arith::primitive_root(p as u64);
            Some(arith::crt_pair(1, d as u64, g, p as u64))
        };
        out.push(Descent { target: d, generator });
    }
    out
}

impl CycloContext {
    /// Columns of the embedding `Q(zeta_d) -> Q(zeta_n)`: coordinates of
    /// `zeta_n^{j*(n/d)}` for `j < phi(d)`.
    fn embed_matrix(&self, d: u32) -> Arc<Vec<Vec<BigInt>>> {
        if let Some(m) = self.embed_mats.lock().unwrap().get(&d) {
            return m.clone();
        }
        let phi_d = arith::euler_phi(d as u64) as usize;
        let step = (self.n / d) as usize;
        let mut cols = Vec::with_capacity(phi_d);
        for j in 0..phi_d {
            let e = j * step;
            let mut col = vec![BigInt::zero(); self.phi];
            if e < self.phi {
                col[e] = BigInt::one();
            } else {
                col.clone_from(&self.red_rows[e - self.phi]);
            }
            cols.push(col);
        }
        let arc = Arc::new(cols);
        self.embed_mats.lock().unwrap().insert(d, arc.clone());
        arc
    }
}

// ============================================================================
// CycloNum
// ============================================================================

/// An element of `Q(zeta_n)` at its minimal conductor.
#[derive(Clone, PartialEq, Eq)]
pub struct CycloNum {
    n: u32,
    c: Vec<BigRational>,
}

impl CycloNum {
    pub fn zero() -> Self {
        CycloNum { n: 1, c: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        CycloNum { n: 1, c: vec![BigRational::one()] }
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycloNum { n: 1, c: vec![r] }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `zeta_n^k`, canonicalised.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let e = k.rem_euclid(n as i64) as usize;
        let mut v = vec![BigRational::zero(); n as usize];
        v[e] = BigRational::one();
        reduce_and_canonicalize(n, v)
    }

    pub fn zeta(n: u32) -> Self {
        Self::root_of_unity(n, 1)
    }

    /// Builds a value from power-basis coordinates at conductor `n`.
    pub fn from_coeffs(n: u32, coeffs: Vec<BigRational>) -> Result<Self, CycloError> {
        if n < 1 {
            return Err(CycloError::BadConductor);
        }
        let phi = arith::euler_phi(n as u64) as usize;
        if coeffs.len() != phi {
            return Err(CycloError::CoefficientCount { n, expected: phi, got: coeffs.len() });
        }
        Ok(canonicalize(n, coeffs))
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The value as a rational, when the conductor is 1.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.n == 1 {
            Some(&self.c[0])
        } else {
            None
        }
    }

    /// The value as an integer, when it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.as_rational()?;
        if r.denom().is_one() {
            Some(r.numer().clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let l = arith::lcm_u64(self.n as u64, other.n as u64) as u32;
        let (sa, sb) = ((l / self.n) as usize, (l / other.n) as usize);
        let mut v = vec![BigRational::zero(); l as usize];
        for (j, cj) in self.c.iter().enumerate() {
            if !cj.is_zero() {
                v[j * sa] += cj;
            }
        }
        for (j, cj) in other.c.iter().enumerate() {
            if !cj.is_zero() {
                if negate {
                    v[j * sb] -= cj;
                } else {
                    v[j * sb] += cj;
                }
            }
        }
        reduce_and_canonicalize(l, v)
    }

    pub fn neg(&self) -> Self {
        CycloNum { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let l = arith::lcm_u64(self.n as u64, other.n as u64) as u32;
        let (sa, sb) = ((l / self.n) as usize, (l / other.n) as usize);
        let ln = l as usize;
        let mut v = vec![BigRational::zero(); ln];
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let base = i * sa;
            for (j, cj) in other.c.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let e = (base + j * sb) % ln;
                v[e] += ci * cj;
            }
        }
        reduce_and_canonicalize(l, v)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        canonicalize(self.n, self.c.iter().map(|x| x * r).collect())
    }

    /// Division by a positive integer (never changes the conductor).
    pub fn div_int(&self, k: u32) -> Self {
        assert!(k > 0);
        let r = BigRational::new(BigInt::one(), BigInt::from(k));
        CycloNum { n: self.n, c: self.c.iter().map(|x| x * &r).collect() }
    }

    pub fn powu(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero { n: self.n });
        }
        if self.n == 1 {
            return Ok(Self::from_rational(self.c[0].recip()));
        }
        let ctx = context(self.n);
        let n = self.n as u64;
        // Scale to integral coordinates, so the conjugate products below stay
        // in integer arithmetic: self = a / d.
        let mut d = BigInt::one();
        for cj in &self.c {
            d = num_integer::lcm(d, cj.denom().clone());
        }
        let a: Vec<BigInt> = self.c.iter().map(|cj| cj.numer() * (&d / cj.denom())).collect();
        // Product of the nontrivial Galois conjugates of a.
        let mut prod: Option<Vec<BigInt>> = None;
        for k in 2..n {
            if num_integer::gcd(k, n) != 1 {
                continue;
            }
            let image = galois_int(&ctx, &a, k);
            prod = Some(match prod {
                None => image,
                Some(p) => mul_int(&ctx, &p, &image),
            });
        }
        let Some(p) = prod else {
            // No nontrivial conjugates means the value is rational.
            return Ok(Self::from_rational(self.c[0].recip()));
        };
        // a times the product of its other conjugates is the field norm of a,
        // a nonzero plain integer sitting in coordinate 0.
        let full = mul_int(&ctx, &a, &p);
        debug_assert!(full[1..].iter().all(|x| x.is_zero()));
        let norm = full[0].clone();
        debug_assert!(!norm.is_zero());
        let coeffs: Vec<BigRational> =
            p.iter().map(|pi| BigRational::new(pi * &d, norm.clone())).collect();
        // The inverse lies in exactly the cyclotomic subfields that contain
        // the value itself, so the conductor is already minimal.
        Ok(CycloNum { n: self.n, c: coeffs })
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycloError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Applies the Galois automorphism `zeta_n -> zeta_n^k` (k coprime to n).
    pub fn galois(&self, k: u64) -> Result<Self, CycloError> {
        if self.n == 1 {
            return Ok(self.clone());
        }
        let n = self.n as u64;
        if num_integer::gcd(k % n, n) != 1 {
            return Err(CycloError::GaloisIndex { k, n: self.n });
        }
        let mut v = vec![BigRational::zero(); self.n as usize];
        for (j, cj) in self.c.iter().enumerate() {
            if !cj.is_zero() {
                v[(j as u64 * k % n) as usize] += cj;
            }
        }
        // Conductors are Galois-stable, so no re-canonicalisation is needed;
        // reduce_and_canonicalize is still the simplest correct reduction.
        Ok(reduce_and_canonicalize(self.n, v))
    }

    /// Complex conjugation, `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        if self.n == 1 {
            return self.clone();
        }
        self.galois(self.n as u64 - 1).expect("n-1 is coprime to n")
    }

    /// Numeric embedding sending `zeta_n` to `exp(2*pi*i/n)`.
    pub fn embed(&self) -> Complex64 {
        let ctx = context(self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, cj) in self.c.iter().enumerate() {
            if !cj.is_zero() {
                acc += ctx.unit[j] * arith::rational_to_f64(cj);
            }
        }
        acc
    }

    /// Quadratic Gauss sum `sum_a (a/p) zeta_p^a`; requires `p ≡ 3 (mod 4)`,
    /// where it squares to `-p`.
    pub fn gauss_sum(p: u32) -> Result<Self, CycloError> {
        if p % 4 != 3 || !arith::is_prime_u64(p as u64) {
            return Err(CycloError::GaussSumPrime { p });
        }
        let mut v = vec![BigRational::zero(); p as usize];
        for a in 1..p {
            let legendre = arith::pow_mod(a as u64, (p as u64 - 1) / 2, p as u64);
            if legendre == 1 {
                v[a as usize] += BigRational::one();
            } else {
                v[a as usize] -= BigRational::one();
            }
        }
        Ok(reduce_and_canonicalize(p, v))
    }
}

// ----------------------------------------------------------------------------
// Reduction and canonicalisation.
// ----------------------------------------------------------------------------

/// Reduces a vector indexed by exponents mod `n` to power-basis coordinates,
/// then minimises the conductor.
pub(crate) fn reduce_and_canonicalize(n: u32, expvec: Vec<BigRational>) -> CycloNum {
    canonicalize(n, reduce_expvec(n, expvec))
}

fn reduce_expvec(n: u32, expvec: Vec<BigRational>) -> Vec<BigRational> {
    let ctx = context(n);
    let mut coeffs: Vec<BigRational> = expvec[..ctx.phi].to_vec();
    for t in ctx.phi..n as usize {
        let v = &expvec[t];
        if !v.is_zero() {
            let row = &ctx.red_rows[t - ctx.phi];
            for j in 0..ctx.phi {
                if !row[j].is_zero() {
                    coeffs[j] += v * &row[j];
                }
            }
        }
    }
    coeffs
}

/// Re-expresses the value over the smallest cyclotomic subfield containing it.
fn canonicalize(mut n: u32, mut coeffs: Vec<BigRational>) -> CycloNum {
    'outer: while n > 1 {
        let ctx = context(n);
        for step in &ctx.descents {
            if let Some(k) = step.generator {
                if !numeric_galois_fixed(&ctx, &coeffs, k) {
                    continue;
                }
            }
            let mat = ctx.embed_matrix(step.target);
            if let Some(smaller) = arith::solve_columns_exact(&mat, &coeffs) {
                n = step.target;
                coeffs = smaller;
                continue 'outer;
            }
        }
        break;
    }
    CycloNum { n, c: coeffs }
}

/// Fast float check whether `sigma_k` fixes the value. Errs on the side of
/// `true`: exact linear algebra then has the final word.
fn numeric_galois_fixed(ctx: &CycloContext, coeffs: &[BigRational], k: u64) -> bool {
    let n = ctx.n as u64;
    let mut orig = Complex64::new(0.0, 0.0);
    let mut mapped = Complex64::new(0.0, 0.0);
    let mut scale = 1.0f64;
    for (j, cj) in coeffs.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let x = arith::rational_to_f64(cj);
        if !x.is_finite() {
            return true;
        }
        scale += x.abs();
        orig += ctx.unit[j] * x;
        mapped += ctx.unit[(j as u64 * k % n) as usize] * x;
    }
    (orig - mapped).norm() <= 1e-6 * scale
}

// ----------------------------------------------------------------------------
// Integral power-basis helpers (used for inversion).
// ----------------------------------------------------------------------------

/// Applies `zeta^j -> zeta^{jk}` to integral power-basis coordinates.
fn galois_int(ctx: &CycloContext, a: &[BigInt], k: u64) -> Vec<BigInt> {
    let n = ctx.n as u64;
    let mut out = vec![BigInt::zero(); ctx.phi];
    for (j, cj) in a.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let e = (j as u64 * k % n) as usize;
        if e < ctx.phi {
            out[e] += cj;
        } else {
            let row = &ctx.red_rows[e - ctx.phi];
            for i in 0..ctx.phi {
                if !row[i].is_zero() {
                    out[i] += cj * &row[i];
                }
            }
        }
    }
    out
}

/// Product of two integral power-basis vectors, reduced mod `Phi_n`.
fn mul_int(ctx: &CycloContext, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let phi = ctx.phi;
    let mut prod = vec![BigInt::zero(); 2 * phi - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                prod[i + j] += ai * bj;
            }
        }
    }
    for i in (phi..prod.len()).rev() {
        if prod[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut prod[i]);
        for j in 0..phi {
            if !ctx.min_poly[j].is_zero() {
                prod[i - phi + j] -= &c * &ctx.min_poly[j];
            }
        }
    }
    prod.truncate(phi);
    prod
}

// ----------------------------------------------------------------------------
// Ordering, hashing, formatting, serde.
// ----------------------------------------------------------------------------

impl PartialOrd for CycloNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical (not numeric) total order: conductor first, then coordinates.
impl Ord for CycloNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.c.cmp(&other.c))
    }
}

impl Hash for CycloNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        for c in &self.c {
            c.numer().hash(state);
            c.denom().hash(state);
        }
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, cj) in self.c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let (sign, mag) = if cj.is_negative() {
                ("-", -cj)
            } else {
                ("+", cj.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let coeff = arith::format_rational(&mag);
            if j == 0 {
                write!(f, "{coeff}")?;
            } else if mag.is_one() {
                write!(f, "z{}^{}", self.n, j)?;
            } else {
                write!(f, "{coeff}*z{}^{}", self.n, j)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    n: u32,
    c: Vec<String>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CycloJson {
            n: self.n,
            c: self.c.iter().map(arith::format_rational).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = CycloJson::deserialize(deserializer)?;
        let coeffs: Result<Vec<_>, _> = raw.c.iter().map(|s| arith::parse_rational(s)).collect();
        let coeffs = coeffs.map_err(serde::de::Error::custom)?;
        CycloNum::from_coeffs(raw.n, coeffs).map_err(serde::de::Error::custom)
    }
}
