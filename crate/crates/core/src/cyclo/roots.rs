//! Roots of a polynomial inside a fixed cyclotomic field.
//!
//! The strategy is modular: reduce the polynomial modulo a large prime `p`
//! with `p ≡ 1 (mod L)`, so that `Q(zeta_L)` has a degree-one prime above
//! `p`. Roots in the residue field are found by Cantor–Zassenhaus, lifted
//! p-adically by Newton iteration, and the exact power-basis coordinates are
//! reconstructed from the lift by lattice reduction. Every candidate is
//! verified by exact evaluation, so lattice heuristics can only cost time,
//! never correctness. A Cauchy-style height bound turns a failed lattice
//! search at high enough precision into a proof that no further root exists
//! in the field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use thiserror::Error;

use super::lll;
use super::poly::CPoly;
use super::{context, CycloError, CycloNum};
use crate::arith;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("cannot take roots of the zero polynomial")]
    ZeroPolynomial,
    #[error("no suitable working prime found for conductor {l}")]
    PrimeSearchFailed { l: u32 },
    #[error("field degree phi({l}) = {phi} exceeds the supported bound {max}")]
    DegreeTooLarge { l: u32, phi: usize, max: usize },
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// Outcome of a root search over `Q(zeta_l)`.
#[derive(Debug, Clone)]
pub struct FieldRoots {
    /// Roots found in the field, with their multiplicities in the input.
    pub roots: Vec<(CycloNum, usize)>,
    /// Distinct roots (over an algebraic closure) not lying in the field.
    pub missing: usize,
    /// When false, the precision cap was reached before every missing root
    /// could be certified; some of them may lie in the field with
    /// coordinates too large to reconstruct.
    pub missing_certain: bool,
}

#[derive(Debug, Clone)]
pub struct RootConfig {
    /// Cap on the field degree `phi(L)` the search will attempt.
    pub max_phi: usize,
    /// Cap on the p-adic working precision, in bits.
    pub max_modulus_bits: u64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { max_phi: 64, max_modulus_bits: 40_000 }
    }
}

pub fn roots_in_field(poly: &CPoly, l: u32) -> Result<FieldRoots, RootError> {
    roots_in_field_with(poly, l, &RootConfig::default())
}

pub fn roots_in_field_with(
    poly: &CPoly,
    l: u32,
    cfg: &RootConfig,
) -> Result<FieldRoots, RootError> {
    if poly.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let l = l.max(1);
    if poly.degree() == Some(0) {
        return Ok(FieldRoots { roots: Vec::new(), missing: 0, missing_certain: true });
    }
    let l_work = arith::lcm_u64(l as u64, poly.coeff_conductor_lcm() as u64) as u32;
    let phi = arith::euler_phi(l_work as u64) as usize;
    if phi > cfg.max_phi {
        return Err(RootError::DegreeTooLarge { l: l_work, phi, max: cfg.max_phi });
    }

    // The monic model has algebraic-integer coefficients: its roots are the
    // original roots scaled by the (cleared) leading coefficient, and in a
    // cyclotomic field algebraic integers have integer power-basis
    // coordinates, which is what the lattice step reconstructs.
    //
    // Prime selection only accepts primes where the reduced polynomial is
    // coprime to its derivative, so a successful pick on the full model
    // proves the polynomial squarefree and the exact remainder sequence,
    // whose coefficients grow severely, is skipped. A polynomial with a
    // genuinely repeated root fails for every prime, hence the small
    // attempt budget before falling back.
    let deg_p = poly.degree().expect("nonconstant by the checks above");
    let mut certified = None;
    if deg_p > 1 {
        let (t_full, lead_full) = monic_integral_model(poly);
        if let Some(picked) = choose_prime_bounded(&t_full, l_work, deg_p, 25) {
            certified = Some((poly.clone(), t_full, lead_full, picked));
        }
    }
    let (sf, t_poly, lead, picked) = match certified {
        Some(tuple) => tuple,
        None => {
            let sf = squarefree_part(poly)?;
            let deg_s = sf.degree().expect("squarefree part of a nonconstant polynomial");
            if deg_s == 1 {
                let root = sf.coeff(0).neg().div(sf.leading())?;
                return if l % root.conductor() == 0 {
                    let m = multiplicity(poly, &root)?;
                    Ok(FieldRoots { roots: vec![(root, m)], missing: 0, missing_certain: true })
                } else {
                    Ok(FieldRoots { roots: Vec::new(), missing: 1, missing_certain: true })
                };
            }
            let (t, lead) = monic_integral_model(&sf);
            let picked = choose_prime(&t, l_work, deg_s)
                .ok_or(RootError::PrimeSearchFailed { l: l_work })?;
            (sf, t, lead, picked)
        }
    };
    let deg_t = sf.degree().expect("nonconstant");
    let t_deriv = t_poly.derivative();
    let fp = Fp { p: picked.p };

    // Residues of roots that split mod p; anything outside the linear part
    // of tbar is certainly not a field root.
    let xp = fp.ppowmod(&[0, 1], picked.p, &picked.tbar);
    let lin = fp.pgcd(&fp.psub(&xp, &[0, 1]), &picked.tbar);
    let split_deg = lin.len().saturating_sub(1);
    let mut missing = deg_t - split_deg;
    let mut pending: Vec<BigInt> = fp
        .roots_of_split_product(&lin)
        .into_iter()
        .map(BigInt::from)
        .collect();

    // Failing lattice searches become proofs of absence once the modulus
    // comfortably exceeds this squared-length threshold for true vectors.
    let reject_threshold = lattice_reject_threshold(&t_poly, l_work, phi);

    let pbits = 64 - picked.p.leading_zeros() as u64;
    let mut modulus = BigInt::from(picked.p);
    let mut w = BigInt::from(picked.omega);
    let mut k: u64 = 1;
    let mut target: u64 = 4;
    let mut found: Vec<CycloNum> = Vec::new();
    let mut certain = true;

    while !pending.is_empty() {
        while k < target {
            modulus = &modulus * &modulus;
            k *= 2;
            w = lift_root_of_unity(&w, l_work as u64, &modulus);
            let wpow = power_table(&w, l_work as usize, &modulus);
            let t_imgs = integral_images(&t_poly, l_work, &wpow, &modulus);
            let d_imgs = integral_images(&t_deriv, l_work, &wpow, &modulus);
            for r in pending.iter_mut() {
                let tv = horner_mod(&t_imgs, r, &modulus);
                let dv = horner_mod(&d_imgs, r, &modulus);
                let inv = arith::inv_mod_big(&dv, &modulus)
                    .expect("derivative is a unit at a simple root");
                *r = (&*r - tv * inv).mod_floor(&modulus);
            }
        }

        let wpow = power_table(&w, l_work as usize, &modulus);
        let mut common = common_sublattice(phi, &wpow, &modulus);
        lll::reduce(&mut common);

        let mut still_pending = Vec::new();
        for r in pending {
            match reconstruct_root(&t_poly, l_work, phi, &common, &r, &modulus, &reject_threshold) {
                Reconstruct::Found(root) => found.push(root),
                Reconstruct::ProvenAbsent => missing += 1,
                Reconstruct::Undecided => still_pending.push(r),
            }
        }
        pending = still_pending;
        if pending.is_empty() {
            break;
        }
        if 2 * target * pbits > cfg.max_modulus_bits {
            missing += pending.len();
            certain = false;
            break;
        }
        target *= 2;
    }

    let mut roots = Vec::new();
    for y in found {
        let x = y.div(&lead)?;
        if l % x.conductor() == 0 {
            let m = multiplicity(poly, &x)?;
            roots.push((x, m));
        } else {
            missing += 1;
        }
    }
    Ok(FieldRoots { roots, missing, missing_certain: certain })
}

enum Reconstruct {
    Found(CycloNum),
    ProvenAbsent,
    Undecided,
}

fn reconstruct_root(
    t_poly: &CPoly,
    l_work: u32,
    phi: usize,
    common: &[Vec<BigInt>],
    r: &BigInt,
    modulus: &BigInt,
    reject_threshold: &Option<BigInt>,
) -> Reconstruct {
    let mut basis: Vec<Vec<BigInt>> = common.to_vec();
    let mut row = vec![BigInt::zero(); phi + 1];
    row[0] = arith::centered_mod(r, modulus);
    row[phi] = BigInt::one();
    basis.push(row);
    lll::reduce(&mut basis);

    for v in &basis {
        let d = &v[phi];
        if d.is_zero() {
            continue;
        }
        let coords: Vec<BigRational> = (0..phi)
            .map(|j| BigRational::new(v[j].clone(), d.clone()))
            .collect();
        let Ok(cand) = CycloNum::from_coeffs(l_work, coords) else {
            continue;
        };
        if t_poly.eval(&cand).is_zero() {
            return Reconstruct::Found(cand);
        }
    }
    // No candidate: decide whether the first reduced vector is already too
    // long for any true root vector to exist in this lattice.
    let b1: BigInt = basis[0].iter().map(|x| x * x).sum();
    match reject_threshold {
        Some(th) if &b1 > th => Reconstruct::ProvenAbsent,
        _ => Reconstruct::Undecided,
    }
}

/// The `d = 0` part of the reconstruction lattice: row `(M, 0, ..)` plus
/// `e_j - w^j e_0` for `1 <= j < phi`, in `phi + 1` coordinates.
fn common_sublattice(phi: usize, wpow: &[BigInt], modulus: &BigInt) -> Vec<Vec<BigInt>> {
    let mut rows = Vec::with_capacity(phi);
    let mut first = vec![BigInt::zero(); phi + 1];
    first[0] = modulus.clone();
    rows.push(first);
    for j in 1..phi {
        let mut row = vec![BigInt::zero(); phi + 1];
        row[0] = -arith::centered_mod(&wpow[j], modulus);
        row[j] = BigInt::one();
        rows.push(row);
    }
    rows
}

/// Upper bound on `2^phi * |v|^2` for the integer vector `v = (coords, 1)`
/// of any root of the monic integral polynomial, via the Cauchy root bound
/// pushed through the inverse of the embedding Vandermonde matrix. `None`
/// when the float computation overflows; absence then stays unproven.
fn lattice_reject_threshold(t_poly: &CPoly, l_work: u32, phi: usize) -> Option<BigInt> {
    let ctx = context(l_work);
    let mut cmax = 0f64;
    for c in t_poly.coeffs() {
        let step = (l_work / c.conductor()) as u64;
        for k in 1..l_work as u64 {
            if num_integer::gcd(k, l_work as u64) != 1 {
                continue;
            }
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for (j, cj) in c.coeffs().iter().enumerate() {
                if !cj.is_zero() {
                    let e = (j as u64 * step * k % l_work as u64) as usize;
                    acc += ctx.unit[e] * arith::rational_to_f64(cj);
                }
            }
            cmax = cmax.max(acc.norm());
        }
    }
    let root_bound = 1.0 + cmax;
    let vinv = vandermonde_inverse_norm(l_work, phi)?;
    let h = vinv * root_bound * 1.001 + 1.0;
    let b2 = phi as f64 * h * h + 1.0;
    let th = b2 * 2f64.powi(phi as i32) * 1.01;
    if !th.is_finite() {
        return None;
    }
    BigInt::from_f64(th.ceil())
}

/// Infinity norm of the inverse of `V[k][j] = zeta^{k j}` over the
/// embeddings `k` coprime to the conductor, computed in floats with partial
/// pivoting.
fn vandermonde_inverse_norm(l_work: u32, phi: usize) -> Option<f64> {
    use num_complex::Complex64;
    let ctx = context(l_work);
    let ks: Vec<u64> = (1..=l_work as u64)
        .filter(|&k| num_integer::gcd(k, l_work as u64) == 1)
        .collect();
    debug_assert_eq!(ks.len(), phi);
    let mut a: Vec<Vec<Complex64>> = ks
        .iter()
        .map(|&k| {
            let mut row: Vec<Complex64> = (0..phi)
                .map(|j| ctx.unit[(k * j as u64 % l_work as u64) as usize])
                .collect();
            let mut aug = vec![Complex64::new(0.0, 0.0); phi];
            row.append(&mut aug);
            row
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[phi + i] = Complex64::new(1.0, 0.0);
    }
    for col in 0..phi {
        let piv = (col..phi).max_by(|&i, &j| {
            a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap()
        })?;
        if a[piv][col].norm() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let inv = a[col][col].inv();
        for x in a[col].iter_mut() {
            *x *= inv;
        }
        for i in 0..phi {
            if i != col {
                let f = a[i][col];
                if f.norm() != 0.0 {
                    for j in 0..2 * phi {
                        let sub = f * a[col][j];
                        a[i][j] -= sub;
                    }
                }
            }
        }
    }
    let norm = a
        .iter()
        .map(|row| row[phi..].iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    norm.is_finite().then_some(norm)
}

// ----------------------------------------------------------------------------
// Exact pre-processing.
// ----------------------------------------------------------------------------

fn squarefree_part(p: &CPoly) -> Result<CPoly, CycloError> {
    let d = p.derivative();
    if d.is_zero() {
        return Ok(p.clone());
    }
    let g = p.gcd(&d)?;
    if g.degree() == Some(0) {
        return Ok(p.clone());
    }
    let (q, r) = p.divrem(&g)?;
    debug_assert!(r.is_zero());
    Ok(q)
}

fn multiplicity(p: &CPoly, root: &CycloNum) -> Result<usize, CycloError> {
    let lin = CPoly::new(vec![root.neg(), CycloNum::one()]);
    let mut cur = p.clone();
    let mut count = 0;
    loop {
        let (q, r) = cur.divrem(&lin)?;
        if r.is_zero() {
            count += 1;
            cur = q;
        } else {
            return Ok(count);
        }
    }
}

/// Clears rational denominators and substitutes `y = lead * x`, producing a
/// monic polynomial with integer power-basis coordinates whose roots are
/// `lead` times the original ones.
fn monic_integral_model(sf: &CPoly) -> (CPoly, CycloNum) {
    let mut denom_lcm = BigInt::one();
    for c in sf.coeffs() {
        for coord in c.coeffs() {
            denom_lcm = denom_lcm.lcm(coord.denom());
        }
    }
    let gamma = BigRational::from_integer(denom_lcm);
    let ints: Vec<CycloNum> = sf.coeffs().iter().map(|c| c.scale(&gamma)).collect();
    let m = ints.len() - 1;
    let lead = ints[m].clone();
    let mut out = Vec::with_capacity(m + 1);
    for (i, b) in ints.iter().enumerate().take(m) {
        out.push(b.mul(&lead.powu((m - 1 - i) as u64)));
    }
    out.push(CycloNum::one());
    (CPoly::new(out), lead)
}

// ----------------------------------------------------------------------------
// Prime selection and p-adic lifting.
// ----------------------------------------------------------------------------

struct PickedPrime {
    p: u64,
    omega: u64,
    tbar: Vec<u64>,
}

fn choose_prime(t_poly: &CPoly, l_work: u32, deg_t: usize) -> Option<PickedPrime> {
    choose_prime_bounded(t_poly, l_work, deg_t, 2000)
}

fn choose_prime_bounded(
    t_poly: &CPoly,
    l_work: u32,
    deg_t: usize,
    attempts: usize,
) -> Option<PickedPrime> {
    let lw = l_work as u64;
    let mut t = (1u64 << 44) / lw + 1;
    for _ in 0..attempts {
        let p = t * lw + 1;
        t += 1;
        if !arith::is_prime_u64(p) {
            continue;
        }
        let Some(omega) = arith::element_of_order(p, lw) else {
            continue;
        };
        let fp = Fp { p };
        let tbar = reduce_integral_poly(t_poly, l_work, omega, &fp);
        if tbar.len() != deg_t + 1 {
            continue;
        }
        let der = fp.pderiv(&tbar);
        if fp.pgcd(&tbar, &der).len() != 1 {
            continue;
        }
        return Some(PickedPrime { p, omega, tbar });
    }
    None
}

fn reduce_integral_poly(t_poly: &CPoly, l_work: u32, omega: u64, fp: &Fp) -> Vec<u64> {
    let p = BigInt::from(fp.p);
    let mut out = Vec::with_capacity(t_poly.coeffs().len());
    for c in t_poly.coeffs() {
        let step = (l_work / c.conductor()) as u64;
        let mut acc = 0u64;
        for (j, cj) in c.coeffs().iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            debug_assert!(cj.denom().is_one());
            let residue = cj.numer().mod_floor(&p).to_u64().expect("residue fits u64");
            let zpow = arith::pow_mod(omega, j as u64 * step % l_work as u64, fp.p);
            acc = fp.add(acc, fp.mul(residue, zpow));
        }
        out.push(acc);
    }
    Fp::ptrim(out)
}

fn lift_root_of_unity(w: &BigInt, lw: u64, modulus: &BigInt) -> BigInt {
    if lw == 1 {
        return BigInt::one();
    }
    let wl1 = w.modpow(&BigInt::from(lw - 1), modulus);
    let f = (&wl1 * w - BigInt::one()).mod_floor(modulus);
    if f.is_zero() {
        return w.clone();
    }
    let df = (BigInt::from(lw) * wl1).mod_floor(modulus);
    let inv = arith::inv_mod_big(&df, modulus).expect("unit derivative for x^L - 1");
    (w - f * inv).mod_floor(modulus)
}

fn power_table(w: &BigInt, l_work: usize, modulus: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(l_work);
    out.push(BigInt::one());
    for _ in 1..l_work {
        out.push((out.last().unwrap() * w).mod_floor(modulus));
    }
    out
}

fn integral_images(poly: &CPoly, l_work: u32, wpow: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    poly.coeffs()
        .iter()
        .map(|c| {
            let step = (l_work / c.conductor()) as usize;
            let mut acc = BigInt::zero();
            for (j, cj) in c.coeffs().iter().enumerate() {
                if !cj.is_zero() {
                    debug_assert!(cj.denom().is_one());
                    acc += cj.numer() * &wpow[j * step % l_work as usize];
                }
            }
            acc.mod_floor(modulus)
        })
        .collect()
}

fn horner_mod(coeffs: &[BigInt], x: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (&acc * x + c).mod_floor(modulus);
    }
    acc
}

// ----------------------------------------------------------------------------
// Arithmetic in F_p[x]. Polynomials are trimmed ascending coefficient
// vectors; the zero polynomial is the empty vector.
// ----------------------------------------------------------------------------

struct Fp {
    p: u64,
}

impl Fp {
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.p as u128) as u64
    }

    fn inv(&self, a: u64) -> u64 {
        arith::inv_mod(a, self.p).expect("inverse of nonzero residue")
    }

    fn ptrim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn psub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] = *x;
        }
        for (i, x) in b.iter().enumerate() {
            out[i] = self.sub(out[i], *x);
        }
        Self::ptrim(out)
    }

    fn pmul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        Self::ptrim(out)
    }

    fn prem(&self, a: &[u64], m: &[u64]) -> Vec<u64> {
        debug_assert!(!m.is_empty());
        let dm = m.len() - 1;
        let mut rem = a.to_vec();
        if dm == 0 {
            return Vec::new();
        }
        let lead_inv = self.inv(m[dm]);
        while rem.len() > dm {
            let k = rem.len() - 1;
            let c = self.mul(rem[k], lead_inv);
            if c != 0 {
                for j in 0..=dm {
                    let idx = k - dm + j;
                    rem[idx] = self.sub(rem[idx], self.mul(c, m[j]));
                }
            }
            rem.pop();
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        rem
    }

    fn pgcd(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        while !b.is_empty() {
            let r = self.prem(&a, &b);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let inv = self.inv(lead);
            for x in a.iter_mut() {
                *x = self.mul(*x, inv);
            }
        }
        a
    }

    fn ppowmod(&self, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = self.prem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.prem(&self.pmul(&acc, &b), m);
            }
            e >>= 1;
            if e > 0 {
                b = self.prem(&self.pmul(&b, &b), m);
            }
        }
        acc
    }

    fn pderiv(&self, a: &[u64]) -> Vec<u64> {
        if a.len() <= 1 {
            return Vec::new();
        }
        let out = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, i as u64 % self.p))
            .collect();
        Self::ptrim(out)
    }

    /// Roots of a product of distinct linear factors, via repeated
    /// quadratic-residue splitting with sequential shifts.
    fn roots_of_split_product(&self, g: &[u64]) -> Vec<u64> {
        let mut out = Vec::new();
        let mut stack = vec![g.to_vec()];
        let mut shift = 1u64;
        while let Some(h) = stack.pop() {
            match h.len() {
                0 | 1 => continue,
                2 => {
                    out.push(self.sub(0, self.mul(h[0], self.inv(h[1]))));
                    continue;
                }
                _ => {}
            }
            loop {
                let a = shift;
                shift += 1;
                let w = self.ppowmod(&[a, 1], (self.p - 1) / 2, &h);
                let w1 = self.psub(&w, &[1]);
                let f1 = self.pgcd(&w1, &h);
                if f1.len() > 1 && f1.len() < h.len() {
                    let (q, r) = self.pdivide(&h, &f1);
                    debug_assert!(r.is_empty());
                    stack.push(f1);
                    stack.push(q);
                    break;
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn pdivide(&self, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
        debug_assert!(!b.is_empty());
        let db = b.len() - 1;
        let mut rem = a.to_vec();
        if a.len() <= db {
            return (Vec::new(), Self::ptrim(rem));
        }
        let lead_inv = self.inv(b[db]);
        let mut q = vec![0u64; a.len() - db];
        while rem.len() > db {
            let k = rem.len() - 1;
            let c = self.mul(rem[k], lead_inv);
            q[k - db] = c;
            if c != 0 {
                for j in 0..=db {
                    let idx = k - db + j;
                    rem[idx] = self.sub(rem[idx], self.mul(c, b[j]));
                }
            }
            rem.pop();
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        (Self::ptrim(q), rem)
    }
}
