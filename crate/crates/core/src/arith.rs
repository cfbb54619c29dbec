//! Small number-theoretic and linear-algebra helpers shared across the crate.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Trial-division factorisation, returned as (prime, exponent) pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factor_u64(n) {
        out = out / p * (p - 1);
    }
    out
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / a.gcd(&b) * b
    }
}

/// `b^e mod m` with 128-bit intermediates.
pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    if m == 1 {
        return 0;
    }
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Modular inverse, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Modular inverse over arbitrary-precision integers, if it exists.
pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_one() {
        Some(t0.mod_floor(m))
    } else {
        None
    }
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest primitive root modulo an odd prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    let fac = prime_divisors(p - 1);
    'cand: for g in 2..p {
        for &q in &fac {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("no primitive root found for prime {p}")
}

/// An element of exact multiplicative order `l` in `F_p`, if `l | p − 1`.
pub fn element_of_order(p: u64, l: u64) -> Option<u64> {
    if (p - 1) % l != 0 {
        return None;
    }
    let g = primitive_root(p);
    let w = pow_mod(g, (p - 1) / l, p);
    for &q in &prime_divisors(l) {
        if pow_mod(w, l / q, p) == 1 {
            return None;
        }
    }
    Some(w)
}

/// CRT lift: the unique `x mod m1*m2` with `x ≡ a1 (m1)`, `x ≡ a2 (m2)` for coprime moduli.
pub fn crt_pair(a1: u64, m1: u64, a2: u64, m2: u64) -> u64 {
    let inv = inv_mod(m1 % m2, m2).expect("crt moduli must be coprime");
    let diff = (a2 + m2 - a1 % m2) % m2;
    let t = (diff as u128 * inv as u128 % m2 as u128) as u64;
    a1 + m1 * t
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let make = |num: &str, den: &str| -> Result<BigRational, String> {
        let n: BigInt = num
            .parse()
            .map_err(|_| format!("bad numerator in rational {s:?}"))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| format!("bad denominator in rational {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in rational {s:?}"));
        }
        Ok(BigRational::new(n, d))
    };
    match s.split_once('/') {
        Some((num, den)) => make(num, den),
        None => make(s, "1"),
    }
}

/// Formats a rational as `"p"` or `"p/q"` (reduced, denominator positive).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Solves `M x = rhs` exactly over Q, where `M` is given by integer columns.
/// Returns `None` when the system is inconsistent.
pub fn solve_columns_exact(cols: &[Vec<BigInt>], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = rhs.len();
    let ncols = cols.len();
    debug_assert!(cols.iter().all(|c| c.len() == rows));
    // Augmented matrix, row major.
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = cols
                .iter()
                .map(|c| BigRational::from_integer(c[i].clone()))
                .collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; ncols];
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in c..=ncols {
                    let sub = &m[r][c2] * &f;
                    m[i][c2] -= sub;
                }
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == rows {
            break;
        }
    }
    // Inconsistent if any zero row has nonzero rhs.
    for row in m.iter().skip(r) {
        if !row[ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); ncols];
    for c in 0..ncols {
        if pivot_of_col[c] != usize::MAX {
            x[c] = m[pivot_of_col[c]][ncols].clone();
        }
    }
    // Free variables are set to zero; verify the candidate actually solves the system.
    for i in 0..rows {
        let mut acc = BigRational::zero();
        for c in 0..ncols {
            acc += BigRational::from_integer(cols[c][i].clone()) * &x[c];
        }
        if acc != rhs[i] {
            return None;
        }
    }
    Some(x)
}

/// Centered representative of `a mod m` in `(−m/2, m/2]`.
pub fn centered_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let mut r = a.mod_floor(m);
    let twice = &r * 2;
    if twice > *m {
        r -= m;
    }
    r
}

/// Integer square root check: `Some(s)` iff `n = s^2`.
pub fn perfect_sqrt(n: &BigUint) -> Option<BigUint> {
    let s = n.sqrt();
    if &s * &s == *n {
        Some(s)
    } else {
        None
    }
}
