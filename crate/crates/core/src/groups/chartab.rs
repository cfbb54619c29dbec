//! Character tables with exact cyclotomic entries.
//!
//! Tables are computed by the modular method: work in `F_p` for a prime
//! `p ≡ 1 (mod exp G)` with `p > 2 sqrt(|G|)`, split the class-sum algebra
//! into common eigenvectors, read off the mod-p characters, and lift each
//! value to a sum of roots of unity through eigenvalue multiplicities. The
//! lifted table is then verified against the exact orthogonality relations,
//! which is also the acceptance test applied to ingested tables.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GroupData, GroupError};
use crate::arith;
use crate::cyclo::{self, CycloNum};

#[derive(Debug, Error)]
pub enum CharTableError {
    #[error("expected {expected} classes, table lists {got}")]
    WrongClassCount { expected: usize, got: usize },
    #[error("class representative {rep} is out of range")]
    BadClassRep { rep: usize },
    #[error("class representative {rep} duplicates an earlier class")]
    DuplicateClassRep { rep: usize },
    #[error("class of {rep} has {expected} elements, table says {got}")]
    WrongClassSize { rep: usize, expected: usize, got: usize },
    #[error("expected {expected} character rows, got {got}")]
    RowCount { expected: usize, got: usize },
    #[error("row {row} has {got} entries, expected {expected}")]
    RowLength { row: usize, expected: usize, got: usize },
    #[error("row {row} does not have a positive integer degree")]
    BadDegree { row: usize },
    #[error("degrees square-sum to {got}, group order is {expected}")]
    DegreeSum { expected: usize, got: String },
    #[error("rows {a} and {b} violate orthogonality")]
    RowOrthogonality { a: usize, b: usize },
    #[error("columns {a} and {b} violate orthogonality")]
    ColumnOrthogonality { a: usize, b: usize },
    #[error("no suitable working prime for exponent {e}")]
    NoSuitablePrime { e: usize },
    #[error("class algebra failed to split into one-dimensional eigenspaces")]
    EigenSplit,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A conjugacy class named by one of its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRef {
    pub rep: usize,
    pub size: usize,
}

/// Character table: one row per irreducible character, columns in the order
/// of `classes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharTable {
    pub classes: Vec<ClassRef>,
    pub rows: Vec<Vec<CycloNum>>,
}

impl CharTable {
    /// Computes the table of irreducible characters, classes ordered by
    /// smallest member and rows by (degree, canonical entry order).
    pub fn compute(group: &GroupData) -> Result<CharTable, CharTableError> {
        let cls = group.conjugacy_classes();
        let k = cls.count();
        let n = group.order as u64;
        let e = group.exponent() as u64;
        let p = (1u64..1_000_000)
            .map(|t| t * e + 1)
            .filter(|&p| p * p > 4 * n)
            .find(|&p| arith::is_prime_u64(p))
            .ok_or(CharTableError::NoSuitablePrime { e: e as usize })?;

        let members = cls.members();
        let id_class = cls.class_of[group.identity()];
        let inv_class: Vec<usize> =
            cls.reps.iter().map(|&r| cls.class_of[group.inverse(r)]).collect();
        let pow_class: Vec<Vec<usize>> = cls
            .reps
            .iter()
            .map(|&r| {
                let mut x = group.identity();
                (0..e)
                    .map(|_| {
                        let c = cls.class_of[x];
                        x = group.op(x, r);
                        c
                    })
                    .collect()
            })
            .collect();

        // Class-sum coefficients a_{ijt}: the (j, t) entry of the matrix for
        // class i counts pairs in C_i x C_j multiplying to a fixed element
        // of C_t.
        let mats: Vec<Vec<Vec<u64>>> = (0..k)
            .map(|i| {
                let mut m = vec![vec![0u64; k]; k];
                for (j, row) in m.iter_mut().enumerate() {
                    let mut cnt = vec![0u64; k];
                    for &x in &members[i] {
                        for &y in &members[j] {
                            cnt[cls.class_of[group.op(x, y)]] += 1;
                        }
                    }
                    for t in 0..k {
                        debug_assert_eq!(cnt[t] % cls.sizes[t] as u64, 0);
                        row[t] = cnt[t] / cls.sizes[t] as u64 % p;
                    }
                }
                m
            })
            .collect();

        // Refine the full space into common eigenvectors of all class-sum
        // matrices; invariance under the whole family makes the restriction
        // to each intermediate subspace well defined.
        let mut spaces: Vec<(Vec<Vec<u64>>, Vec<usize>)> = {
            let mut id = vec![vec![0u64; k]; k];
            for (j, row) in id.iter_mut().enumerate() {
                row[j] = 1;
            }
            vec![(id, (0..k).collect())]
        };
        for i in 0..k {
            if i == id_class || spaces.iter().all(|(b, _)| b.len() == 1) {
                continue;
            }
            let mut next = Vec::with_capacity(k);
            for (basis, pivots) in spaces {
                let dim = basis.len();
                if dim == 1 {
                    next.push((basis, pivots));
                    continue;
                }
                let at = restricted_action_transposed(p, &mats[i], &basis, &pivots);
                let mut collected = 0;
                for lam in 0..p {
                    if collected == dim {
                        break;
                    }
                    let mut shifted = at.clone();
                    for (r, row) in shifted.iter_mut().enumerate() {
                        row[r] = msub(p, row[r], lam);
                    }
                    let ker = kernel(p, &shifted);
                    if ker.is_empty() {
                        continue;
                    }
                    collected += ker.len();
                    let mut ambient: Vec<Vec<u64>> = ker
                        .iter()
                        .map(|u| {
                            let mut v = vec![0u64; k];
                            for (r, &ur) in u.iter().enumerate() {
                                if ur != 0 {
                                    for (t, &bt) in basis[r].iter().enumerate() {
                                        v[t] = madd(p, v[t], mmul(p, ur, bt));
                                    }
                                }
                            }
                            v
                        })
                        .collect();
                    let piv = rref(p, &mut ambient);
                    next.push((ambient, piv));
                }
                if collected != dim {
                    return Err(CharTableError::EigenSplit);
                }
            }
            spaces = next;
        }
        if spaces.len() != k || spaces.iter().any(|(b, _)| b.len() != 1) {
            return Err(CharTableError::EigenSplit);
        }

        let z = arith::element_of_order(p, e).ok_or(CharTableError::EigenSplit)?;
        let zinv = minv(p, z);
        let einv = minv(p, e % p);
        let isqrt_n = {
            let mut r = (n as f64).sqrt() as u64 + 1;
            while r * r > n {
                r -= 1;
            }
            r
        };

        let mut rows: Vec<Vec<CycloNum>> = Vec::with_capacity(k);
        for (basis, _) in &spaces {
            let v = &basis[0];
            if v[id_class] == 0 {
                return Err(CharTableError::EigenSplit);
            }
            let scale = minv(p, v[id_class]);
            let u: Vec<u64> = v.iter().map(|&x| mmul(p, x, scale)).collect();
            let s = (0..k).fold(0u64, |acc, j| {
                let term = mmul(p, mmul(p, u[j], u[inv_class[j]]), minv(p, cls.sizes[j] as u64 % p));
                madd(p, acc, term)
            });
            let d2 = mmul(p, n % p, minv(p, s));
            let d = (1..=isqrt_n)
                .find(|&r| mmul(p, r, r) == d2)
                .ok_or(CharTableError::EigenSplit)?;
            let chbar: Vec<u64> = (0..k)
                .map(|j| mmul(p, mmul(p, d, u[j]), minv(p, cls.sizes[j] as u64 % p)))
                .collect();
            let row: Vec<CycloNum> = (0..k)
                .map(|j| {
                    let mut expvec = vec![BigRational::zero(); e as usize];
                    for (t, slot) in expvec.iter_mut().enumerate() {
                        let mut acc = 0u64;
                        for s in 0..e {
                            let w = arith::pow_mod(zinv, t as u64 * s % e, p);
                            acc = madd(p, acc, mmul(p, chbar[pow_class[j][s as usize]], w));
                        }
                        let mult = mmul(p, einv, acc);
                        *slot = BigRational::from_integer(BigInt::from(mult));
                    }
                    cyclo::reduce_and_canonicalize(e as u32, expvec)
                })
                .collect();
            rows.push(row);
        }
        rows.sort_by(|a, b| {
            let da = a[id_class].clone();
            let db = b[id_class].clone();
            da.cmp(&db).then_with(|| a.cmp(b))
        });

        let table = CharTable {
            classes: cls
                .reps
                .iter()
                .zip(&cls.sizes)
                .map(|(&rep, &size)| ClassRef { rep, size })
                .collect(),
            rows,
        };
        table.validate(group)?;
        Ok(table)
    }

    /// Full consistency check of a table against its group: class list,
    /// degrees, and both orthogonality relations, all exact.
    pub fn validate(&self, group: &GroupData) -> Result<(), CharTableError> {
        let cls = group.conjugacy_classes();
        let k = cls.count();
        if self.classes.len() != k {
            return Err(CharTableError::WrongClassCount { expected: k, got: self.classes.len() });
        }
        let mut seen = vec![false; k];
        for cr in &self.classes {
            if cr.rep >= group.order {
                return Err(CharTableError::BadClassRep { rep: cr.rep });
            }
            let c = cls.class_of[cr.rep];
            if seen[c] {
                return Err(CharTableError::DuplicateClassRep { rep: cr.rep });
            }
            seen[c] = true;
            if cls.sizes[c] != cr.size {
                return Err(CharTableError::WrongClassSize {
                    rep: cr.rep,
                    expected: cls.sizes[c],
                    got: cr.size,
                });
            }
        }
        if self.rows.len() != k {
            return Err(CharTableError::RowCount { expected: k, got: self.rows.len() });
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != k {
                return Err(CharTableError::RowLength { row: i, expected: k, got: row.len() });
            }
        }

        let id_col = self.identity_column(group)?;
        let mut deg_sq = BigInt::zero();
        for (i, row) in self.rows.iter().enumerate() {
            match row[id_col].as_integer() {
                Some(d) if d > BigInt::zero() => deg_sq += &d * &d,
                _ => return Err(CharTableError::BadDegree { row: i }),
            }
        }
        if deg_sq != BigInt::from(group.order) {
            return Err(CharTableError::DegreeSum {
                expected: group.order,
                got: deg_sq.to_string(),
            });
        }

        let order = CycloNum::from_int(group.order as i64);
        for a in 0..k {
            for b in a..k {
                let mut acc = CycloNum::zero();
                for (j, cr) in self.classes.iter().enumerate() {
                    let term = self.rows[a][j].mul(&self.rows[b][j].conj());
                    acc = acc.add(&term.scale(&BigRational::from_integer(BigInt::from(cr.size))));
                }
                let expect = if a == b { order.clone() } else { CycloNum::zero() };
                if acc != expect {
                    return Err(CharTableError::RowOrthogonality { a, b });
                }
            }
        }
        for a in 0..k {
            for b in a..k {
                let mut acc = CycloNum::zero();
                for row in &self.rows {
                    acc = acc.add(&row[a].mul(&row[b].conj()));
                }
                let expect = if a == b {
                    CycloNum::from_rational(BigRational::new(
                        BigInt::from(group.order),
                        BigInt::from(self.classes[a].size),
                    ))
                } else {
                    CycloNum::zero()
                };
                if acc != expect {
                    return Err(CharTableError::ColumnOrthogonality { a, b });
                }
            }
        }
        Ok(())
    }

    /// Index of the column holding the identity class.
    pub fn identity_column(&self, group: &GroupData) -> Result<usize, CharTableError> {
        let cls = group.conjugacy_classes();
        let id_class = cls.class_of[group.identity()];
        self.classes
            .iter()
            .position(|cr| cr.rep < group.order && cls.class_of[cr.rep] == id_class)
            .ok_or(CharTableError::WrongClassCount {
                expected: cls.count(),
                got: self.classes.len(),
            })
    }

    /// Per-element column lookup: `map[g]` is the column of `g`'s class.
    pub fn column_map(&self, group: &GroupData) -> Result<Vec<usize>, CharTableError> {
        let cls = group.conjugacy_classes();
        let mut col_of_class = vec![usize::MAX; cls.count()];
        for (c, cr) in self.classes.iter().enumerate() {
            if cr.rep >= group.order {
                return Err(CharTableError::BadClassRep { rep: cr.rep });
            }
            col_of_class[cls.class_of[cr.rep]] = c;
        }
        if col_of_class.contains(&usize::MAX) {
            return Err(CharTableError::WrongClassCount {
                expected: cls.count(),
                got: self.classes.len(),
            });
        }
        Ok((0..group.order).map(|g| col_of_class[cls.class_of[g]]).collect())
    }

    /// Degree of row `i` (its value at the identity).
    pub fn degree(&self, group: &GroupData, i: usize) -> Result<u64, CharTableError> {
        let id_col = self.identity_column(group)?;
        self.rows[i][id_col]
            .as_integer()
            .and_then(|d| u64::try_from(d).ok())
            .filter(|&d| d > 0)
            .ok_or(CharTableError::BadDegree { row: i })
    }
}

fn madd(p: u64, a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn msub(p: u64, a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mmul(p: u64, a: u64, b: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn minv(p: u64, a: u64) -> u64 {
    arith::inv_mod(a, p).expect("inverse of nonzero residue")
}

/// Reduced row echelon form in place; returns pivot columns and drops zero
/// rows.
fn rref(p: u64, rows: &mut Vec<Vec<u64>>) -> Vec<usize> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = minv(p, rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = mmul(p, *x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..ncols {
                    let sub = mmul(p, f, rows[r][j]);
                    rows[i][j] = msub(p, rows[i][j], sub);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Kernel basis of a square matrix over `F_p`.
fn kernel(p: u64, m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = m.len();
    let mut rows = m.to_vec();
    let piv = rref(p, &mut rows);
    let mut is_pivot = vec![false; n];
    for &c in &piv {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in 0..n {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![0u64; n];
        v[free] = 1;
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = msub(p, 0, rows[r][free]);
        }
        out.push(v);
    }
    out
}

/// Matrix (transposed) of the action of `m` on the span of `basis`, in the
/// coordinates read off at the pivot columns. The span must be invariant.
fn restricted_action_transposed(
    p: u64,
    m: &[Vec<u64>],
    basis: &[Vec<u64>],
    pivots: &[usize],
) -> Vec<Vec<u64>> {
    let dim = basis.len();
    let k = basis[0].len();
    let mut at = vec![vec![0u64; dim]; dim];
    for (r, b) in basis.iter().enumerate() {
        let mut img = vec![0u64; k];
        for (j, row) in m.iter().enumerate() {
            let mut acc = 0u64;
            for (t, &bt) in b.iter().enumerate() {
                if bt != 0 {
                    acc = madd(p, acc, mmul(p, row[t], bt));
                }
            }
            img[j] = acc;
        }
        for (s, &pc) in pivots.iter().enumerate() {
            at[s][r] = img[pc];
        }
        #[cfg(debug_assertions)]
        {
            let mut check = vec![0u64; k];
            for (s, &pc) in pivots.iter().enumerate() {
                let coef = img[pc];
                for (t, &bt) in basis[s].iter().enumerate() {
                    check[t] = madd(p, check[t], mmul(p, coef, bt));
                }
            }
            debug_assert_eq!(check, img, "subspace not invariant under class-sum matrix");
        }
    }
    at
}

#[cfg(test)]
mod tests {
    use super::super::samples;
    use super::*;

    #[test]
    fn cyclic_group_characters_are_root_powers() {
        let g = samples::cyclic(4, 2);
        let t = CharTable::compute(&g).unwrap();
        assert_eq!(t.classes.len(), 4);
        assert!(t.rows.iter().all(|r| r[0] == CycloNum::one()));
        // the four rows evaluate at the generator to the four 4th roots
        let mut at_gen: Vec<CycloNum> = t.rows.iter().map(|r| r[1].clone()).collect();
        at_gen.sort();
        let mut expect: Vec<CycloNum> =
            (0..4).map(|j| CycloNum::root_of_unity(4, j)).collect();
        expect.sort();
        assert_eq!(at_gen, expect);
    }

    #[test]
    fn symmetric3_degrees() {
        let g = samples::dihedral(3);
        let t = CharTable::compute(&g).unwrap();
        let degs: Vec<u64> = (0..3).map(|i| t.degree(&g, i).unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 2]);
    }

    #[test]
    fn quaternion_degrees_and_last_row() {
        let g = samples::quaternion();
        let t = CharTable::compute(&g).unwrap();
        let degs: Vec<u64> = (0..5).map(|i| t.degree(&g, i).unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 1, 1, 2]);
        // the 2-dimensional character vanishes off {1, -1}
        let two_dim = &t.rows[4];
        let id_col = t.identity_column(&g).unwrap();
        for (j, v) in two_dim.iter().enumerate() {
            if j == id_col {
                assert_eq!(*v, CycloNum::from_int(2));
            } else if *v != CycloNum::from_int(-2) {
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn order21_table_matches_known_values() {
        let g = samples::c7c3();
        let t = CharTable::compute(&g).unwrap();
        let degs: Vec<u64> = (0..5).map(|i| t.degree(&g, i).unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 1, 3, 3]);
        // the cubic rows take the two conjugate quadratic-irrational values
        // on the size-3 classes
        let cols: Vec<usize> = t
            .classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.size == 3)
            .map(|(j, _)| j)
            .collect();
        assert_eq!(cols.len(), 2);
        let gauss = CycloNum::gauss_sum(7).unwrap();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let alpha = CycloNum::from_int(-1).add(&gauss).scale(&half);
        let beta = CycloNum::from_int(-1).sub(&gauss).scale(&half);
        for row in [&t.rows[3], &t.rows[4]] {
            let mut vals = vec![row[cols[0]].clone(), row[cols[1]].clone()];
            vals.sort();
            let mut expect = vec![alpha.clone(), beta.clone()];
            expect.sort();
            assert_eq!(vals, expect);
        }
        // and they vanish on the size-7 classes
        for (j, c) in t.classes.iter().enumerate() {
            if c.size == 7 {
                assert!(t.rows[3][j].is_zero());
                assert!(t.rows[4][j].is_zero());
            }
        }
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let g = samples::dihedral(3);
        let mut t = CharTable::compute(&g).unwrap();
        t.rows[2][1] = CycloNum::from_int(5);
        assert!(matches!(
            t.validate(&g),
            Err(CharTableError::RowOrthogonality { .. })
        ));

        let mut t2 = CharTable::compute(&g).unwrap();
        t2.classes[1].size = 1;
        assert!(matches!(
            t2.validate(&g),
            Err(CharTableError::WrongClassSize { .. })
        ));
    }

    #[test]
    fn permuted_columns_still_validate() {
        // ingested tables may list classes in any order
        let g = samples::c7c3();
        let mut t = CharTable::compute(&g).unwrap();
        t.classes.swap(0, 3);
        for row in t.rows.iter_mut() {
            row.swap(0, 3);
        }
        assert!(t.validate(&g).is_ok());
        let map = t.column_map(&g).unwrap();
        assert_eq!(map[g.identity()], 3);
    }
}
