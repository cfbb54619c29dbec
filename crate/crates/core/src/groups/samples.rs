//! Ready-made groups used by tests, fixtures, and the round-trip sampler.

use super::GroupData;

fn table<F: Fn(usize, usize) -> usize>(order: usize, f: F) -> Vec<usize> {
    let mut mul = Vec::with_capacity(order * order);
    for a in 0..order {
        for b in 0..order {
            mul.push(f(a, b));
        }
    }
    mul
}

/// `Z/n` with the subgroup of order `inertia_order` as inertia and `1` as
/// the Frobenius representative.
pub fn cyclic(n: usize, inertia_order: usize) -> GroupData {
    assert!(n >= 1 && inertia_order >= 1 && n % inertia_order == 0);
    let stride = n / inertia_order;
    GroupData {
        order: n,
        mul: table(n, |a, b| (a + b) % n),
        inertia: (0..inertia_order).map(|k| k * stride).collect(),
        frob: 1 % n,
    }
}

/// `Z/n` that is entirely inertia (trivial unramified quotient).
pub fn cyclic_full_inertia(n: usize) -> GroupData {
    let mut g = cyclic(n, n);
    g.frob = 0;
    g
}

/// Dihedral group of order `2n`, rotations as inertia, a reflection as
/// Frobenius. Element `i + n*j` is the rotation `r^i` composed with `j`
/// reflections.
pub fn dihedral(n: usize) -> GroupData {
    assert!(n >= 2);
    let f = |a: usize, b: usize| {
        let (i1, j1) = (a % n, a / n);
        let (i2, j2) = (b % n, b / n);
        let i = if j1 == 0 { (i1 + i2) % n } else { (i1 + n - i2 % n) % n };
        i + n * ((j1 + j2) % 2)
    };
    GroupData {
        order: 2 * n,
        mul: table(2 * n, f),
        inertia: (0..n).collect(),
        frob: n,
    }
}

/// Quaternion group of order 8, the cyclic subgroup generated by `x` as
/// inertia and `y` as Frobenius. Element `a + 4*b` stands for `x^a y^b`.
pub fn quaternion() -> GroupData {
    let f = |u: usize, v: usize| {
        let (a1, b1) = (u % 4, u / 4);
        let (a2, b2) = (v % 4, v / 4);
        let flip = if b1 == 0 { a2 } else { (4 - a2) % 4 };
        let extra = if b1 == 1 && b2 == 1 { 2 } else { 0 };
        (a1 + flip + extra) % 4 + 4 * ((b1 + b2) % 2)
    };
    GroupData { order: 8, mul: table(8, f), inertia: vec![0, 1, 2, 3], frob: 4 }
}

/// The nonabelian group of order 21, a cyclic 7-group extended by an order-3
/// automorphism. Element `i + 7*j` stands for `s^i t^j` where
/// `t s t^{-1} = s^2`; inertia is the 7-part and `t` represents Frobenius.
pub fn c7c3() -> GroupData {
    let f = |u: usize, v: usize| {
        let (i1, j1) = (u % 7, u / 7);
        let (i2, j2) = (v % 7, v / 7);
        let twist = [1usize, 2, 4][j1];
        ((i1 + twist * i2) % 7) + 7 * ((j1 + j2) % 3)
    };
    GroupData { order: 21, mul: table(21, f), inertia: (0..7).collect(), frob: 7 }
}
