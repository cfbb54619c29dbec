//! Exact LLL lattice reduction over integer rows.
//!
//! All-integer variant with delta = 3/4: the Gram–Schmidt data is carried as
//! the subdeterminants `d[i]` and scaled projection numerators `lam[i][j]`,
//! so every intermediate quantity is an integer and every division below is
//! exact. The lattices reduced here are small (dimension bounded by the
//! field degree plus one), but their entries are hundreds of bits, which is
//! why avoiding rational normalisation matters.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    debug_assert!(!den.is_zero());
    debug_assert!((&num % den).is_zero(), "inexact division in integral LLL");
    num / den
}

struct State {
    /// `d[i]` is the Gram determinant of the first `i` rows; `d[0] = 1`.
    d: Vec<BigInt>,
    /// `lam[i][j] = mu_ij * d[j+1]` for `j < i`.
    lam: Vec<Vec<BigInt>>,
}

fn init_state(basis: &[Vec<BigInt>]) -> State {
    let k = basis.len();
    let mut d = vec![BigInt::one(); k + 1];
    let mut lam: Vec<Vec<BigInt>> = (0..k).map(|i| vec![BigInt::zero(); i]).collect();
    for i in 0..k {
        for j in 0..=i {
            let mut u = dot(&basis[i], &basis[j]);
            for s in 0..j {
                u = exact_div(&d[s + 1] * u - &lam[i][s] * &lam[j][s], &d[s]);
            }
            if j < i {
                lam[i][j] = u;
            } else {
                d[i + 1] = u;
            }
        }
    }
    State { d, lam }
}

fn size_reduce(basis: &mut [Vec<BigInt>], st: &mut State, i: usize, j: usize) {
    let two_lam: BigInt = &st.lam[i][j] * 2;
    if two_lam.abs() <= st.d[j + 1] {
        return;
    }
    // Nearest integer to lam / d.
    let q = (two_lam + &st.d[j + 1]).div_floor(&(&st.d[j + 1] * 2));
    if q.is_zero() {
        return;
    }
    let prev = basis[j].clone();
    for (x, y) in basis[i].iter_mut().zip(&prev) {
        *x -= &q * y;
    }
    let sub = &q * &st.d[j + 1];
    st.lam[i][j] -= sub;
    for s in 0..j {
        let sub = &q * &st.lam[j][s];
        st.lam[i][s] -= sub;
    }
}

/// Swaps rows `i-1` and `i` and patches the Gram–Schmidt data.
fn swap_rows(basis: &mut [Vec<BigInt>], st: &mut State, i: usize) {
    basis.swap(i - 1, i);
    for j in 0..i.saturating_sub(1) {
        let tmp = st.lam[i][j].clone();
        st.lam[i][j] = std::mem::replace(&mut st.lam[i - 1][j], tmp);
    }
    let l = st.lam[i][i - 1].clone();
    let b = exact_div(&st.d[i - 1] * &st.d[i + 1] + &l * &l, &st.d[i]);
    for s in i + 1..basis.len() {
        let t = st.lam[s][i].clone();
        let prev = st.lam[s][i - 1].clone();
        st.lam[s][i] = exact_div(&st.d[i + 1] * &prev - &l * &t, &st.d[i]);
        st.lam[s][i - 1] = exact_div(&st.d[i - 1] * &t + &l * &prev, &st.d[i]);
    }
    st.d[i] = b;
}

/// Reduces the basis in place; rows must be linearly independent.
pub(crate) fn reduce(basis: &mut Vec<Vec<BigInt>>) {
    let k = basis.len();
    if k < 2 {
        return;
    }
    let mut st = init_state(basis);
    let mut i = 1;
    while i < k {
        size_reduce(basis, &mut st, i, i - 1);
        // Lovász with delta = 3/4: 4 d[i+1] d[i-1] >= 3 d[i]^2 - 4 lam^2.
        let lhs = 4 * (&st.d[i + 1] * &st.d[i - 1]);
        let rhs = 3 * (&st.d[i] * &st.d[i]) - 4 * (&st.lam[i][i - 1] * &st.lam[i][i - 1]);
        if lhs < rhs {
            swap_rows(basis, &mut st, i);
            i = i.max(2) - 1;
        } else {
            for j in (0..i.saturating_sub(1)).rev() {
                size_reduce(basis, &mut st, i, j);
            }
            i += 1;
        }
    }
}
