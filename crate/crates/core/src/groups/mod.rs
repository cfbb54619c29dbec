//! Finite groups given by full multiplication tables, together with the
//! extra structure the trace pipeline needs: a distinguished normal inertia
//! subgroup with cyclic quotient and a chosen Frobenius coset
//! representative.

pub mod chartab;
pub mod samples;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chartab::{CharTable, CharTableError, ClassRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("order must be at least 1")]
    EmptyGroup,
    #[error("multiplication table has {got} entries, expected order^2 = {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("table entry {value} at ({a}, {b}) is outside 0..{order}")]
    EntryOutOfRange { a: usize, b: usize, value: usize, order: usize },
    #[error("no identity element")]
    NoIdentity,
    #[error("element {g} has no inverse")]
    NoInverse { g: usize },
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("inertia list is empty")]
    EmptyInertia,
    #[error("inertia entry {g} is out of range or repeated")]
    BadInertiaEntry { g: usize },
    #[error("inertia does not contain the identity")]
    InertiaMissingIdentity,
    #[error("inertia is not closed: {a} * {b} lands outside")]
    InertiaNotClosed { a: usize, b: usize },
    #[error("inertia is not normal: conjugating {i} by {g} leaves it")]
    InertiaNotNormal { g: usize, i: usize },
    #[error("inertia order {io} does not divide the group order {order}")]
    InertiaIndex { io: usize, order: usize },
    #[error("frobenius element {frob} is out of range")]
    FrobOutOfRange { frob: usize },
    #[error("frobenius cosets do not partition the group (quotient not cyclic of order {f})")]
    QuotientNotCyclic { f: usize },
}

/// A finite group with inertia subgroup and Frobenius representative.
///
/// `mul` is the full multiplication table in row-major order:
/// `mul[a * order + b]` is the product of `a` and `b`. `inertia` lists the
/// elements of the inertia subgroup; `frob` is any element whose coset
/// generates the (cyclic) quotient by inertia.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupData {
    pub order: usize,
    pub mul: Vec<usize>,
    pub inertia: Vec<usize>,
    pub frob: usize,
}

/// Conjugacy classes in canonical order: sorted by their smallest element,
/// which is also the representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassData {
    pub class_of: Vec<usize>,
    pub reps: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ClassData {
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    /// Members of each class, grouped.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count()];
        for (g, &c) in self.class_of.iter().enumerate() {
            out[c].push(g);
        }
        out
    }
}

impl GroupData {
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn identity(&self) -> usize {
        (0..self.order)
            .find(|&e| (0..self.order).all(|g| self.op(e, g) == g && self.op(g, e) == g))
            .expect("validated group has an identity")
    }

    pub fn inverse(&self, g: usize) -> usize {
        let e = self.identity();
        (0..self.order)
            .find(|&h| self.op(g, h) == e)
            .expect("validated group has inverses")
    }

    /// `g^k` for `k >= 0`.
    pub fn power(&self, g: usize, k: usize) -> usize {
        let mut acc = self.identity();
        for _ in 0..k {
            acc = self.op(acc, g);
        }
        acc
    }

    pub fn element_order(&self, g: usize) -> usize {
        let e = self.identity();
        let mut x = g;
        let mut n = 1;
        while x != e {
            x = self.op(x, g);
            n += 1;
        }
        n
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        (0..self.order).fold(1u64, |acc, g| {
            crate::arith::lcm_u64(acc, self.element_order(g) as u64)
        }) as usize
    }

    pub fn inertia_order(&self) -> usize {
        self.inertia.len()
    }

    /// Order of the unramified quotient.
    pub fn residue_degree(&self) -> usize {
        self.order / self.inertia.len()
    }

    /// Checks every structural requirement, collecting all failures.
    pub fn validate(&self) -> ValidationReport {
        let mut errors = Vec::new();
        if self.order == 0 {
            return ValidationReport { errors: vec![GroupError::EmptyGroup] };
        }
        if self.mul.len() != self.order * self.order {
            return ValidationReport {
                errors: vec![GroupError::TableSize {
                    expected: self.order * self.order,
                    got: self.mul.len(),
                }],
            };
        }
        for a in 0..self.order {
            for b in 0..self.order {
                let v = self.op(a, b);
                if v >= self.order {
                    errors.push(GroupError::EntryOutOfRange { a, b, value: v, order: self.order });
                }
            }
        }
        if !errors.is_empty() {
            return ValidationReport { errors };
        }

        let identity = (0..self.order)
            .find(|&e| (0..self.order).all(|g| self.op(e, g) == g && self.op(g, e) == g));
        let Some(e) = identity else {
            errors.push(GroupError::NoIdentity);
            return ValidationReport { errors };
        };
        for g in 0..self.order {
            if !(0..self.order).any(|h| self.op(g, h) == e && self.op(h, g) == e) {
                errors.push(GroupError::NoInverse { g });
            }
        }
        'assoc: for a in 0..self.order {
            for b in 0..self.order {
                for c in 0..self.order {
                    if self.op(self.op(a, b), c) != self.op(a, self.op(b, c)) {
                        errors.push(GroupError::NotAssociative { a, b, c });
                        break 'assoc;
                    }
                }
            }
        }
        if !errors.is_empty() {
            return ValidationReport { errors };
        }

        if self.inertia.is_empty() {
            errors.push(GroupError::EmptyInertia);
            return ValidationReport { errors };
        }
        let mut seen = vec![false; self.order];
        for &i in &self.inertia {
            if i >= self.order || seen[i] {
                errors.push(GroupError::BadInertiaEntry { g: i });
                return ValidationReport { errors };
            }
            seen[i] = true;
        }
        if !seen[e] {
            errors.push(GroupError::InertiaMissingIdentity);
        }
        let in_inertia = seen;
        for &a in &self.inertia {
            for &b in &self.inertia {
                if !in_inertia[self.op(a, b)] {
                    errors.push(GroupError::InertiaNotClosed { a, b });
                }
            }
        }
        if !errors.is_empty() {
            return ValidationReport { errors };
        }
        for g in 0..self.order {
            let ginv = self.inverse(g);
            for &i in &self.inertia {
                if !in_inertia[self.op(self.op(g, i), ginv)] {
                    errors.push(GroupError::InertiaNotNormal { g, i });
                }
            }
        }
        if self.order % self.inertia.len() != 0 {
            errors.push(GroupError::InertiaIndex { io: self.inertia.len(), order: self.order });
        }
        if self.frob >= self.order {
            errors.push(GroupError::FrobOutOfRange { frob: self.frob });
        }
        if errors.is_empty() {
            if let Err(err) = self.frobenius_degrees() {
                errors.push(err);
            }
        }
        ValidationReport { errors }
    }

    /// Assigns to each element the power of Frobenius its inertia coset
    /// corresponds to, in `0..f`. Fails when the cosets of powers of `frob`
    /// do not partition the group.
    pub fn frobenius_degrees(&self) -> Result<Vec<usize>, GroupError> {
        let f = self.order / self.inertia.len();
        let mut deg: Vec<Option<usize>> = vec![None; self.order];
        let mut fpow = self.identity();
        for d in 0..f {
            for &i in &self.inertia {
                let g = self.op(i, fpow);
                if deg[g].is_some() {
                    return Err(GroupError::QuotientNotCyclic { f });
                }
                deg[g] = Some(d);
            }
            fpow = self.op(fpow, self.frob);
        }
        deg.into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(GroupError::QuotientNotCyclic { f })
    }

    pub fn conjugacy_classes(&self) -> ClassData {
        let n = self.order;
        let mut class_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            let mut size = 0;
            for h in 0..n {
                let conj = self.op(self.op(h, g), self.inverse(h));
                if class_of[conj] == usize::MAX {
                    class_of[conj] = c;
                    size += 1;
                }
            }
            reps.push(g);
            sizes.push(size);
        }
        ClassData { class_of, reps, sizes }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub errors: Vec<GroupError>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn into_result(mut self) -> Result<(), GroupError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(self.errors.remove(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::samples;
    use super::*;

    #[test]
    fn samples_pass_validation() {
        for g in [
            samples::cyclic(6, 3),
            samples::cyclic(6, 2),
            samples::cyclic(2, 1),
            samples::dihedral(3),
            samples::dihedral(4),
            samples::quaternion(),
            samples::c7c3(),
        ] {
            let report = g.validate();
            assert!(report.is_valid(), "errors: {:?}", report.errors);
        }
    }

    #[test]
    fn degrees_split_by_coset() {
        let g = samples::c7c3();
        let deg = g.frobenius_degrees().unwrap();
        for i in 0..7 {
            assert_eq!(deg[i], 0);
        }
        for i in 7..14 {
            assert_eq!(deg[i], 1);
        }
        for i in 14..21 {
            assert_eq!(deg[i], 2);
        }
    }

    #[test]
    fn order21_classes() {
        let g = samples::c7c3();
        let cls = g.conjugacy_classes();
        assert_eq!(cls.reps, vec![0, 1, 3, 7, 14]);
        assert_eq!(cls.sizes, vec![1, 3, 3, 7, 7]);
        // the two 3-element classes are the orbits of the cube automorphism
        assert_eq!(cls.class_of[2], cls.class_of[1]);
        assert_eq!(cls.class_of[4], cls.class_of[1]);
        assert_eq!(cls.class_of[6], cls.class_of[3]);
    }

    #[test]
    fn dihedral_structure() {
        let g = samples::dihedral(4);
        assert_eq!(g.order, 8);
        assert_eq!(g.exponent(), 4);
        let cls = g.conjugacy_classes();
        assert_eq!(cls.count(), 5);
        let mut sizes = cls.sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2]);
    }

    #[test]
    fn quaternion_structure() {
        let g = samples::quaternion();
        assert_eq!(g.order, 8);
        // a unique element of order 2
        let count2 = (0..8).filter(|&x| g.element_order(x) == 2).count();
        assert_eq!(count2, 1);
        assert_eq!(g.conjugacy_classes().count(), 5);
    }

    #[test]
    fn validation_catches_bad_tables() {
        let mut g = samples::cyclic(4, 2);
        g.mul[5] = 99;
        assert!(!g.validate().is_valid());

        let mut g = samples::cyclic(4, 2);
        // break associativity while keeping entries in range
        g.mul[5] = 0;
        let report = g.validate();
        assert!(!report.is_valid());

        let mut g = samples::cyclic(6, 3);
        g.inertia = vec![0, 1, 2];
        assert!(g
            .validate()
            .errors
            .iter()
            .any(|e| matches!(e, GroupError::InertiaNotClosed { .. })));

        // non-normal inertia: a reflection subgroup of the dihedral group
        let mut g = samples::dihedral(3);
        g.inertia = vec![0, 3];
        assert!(g
            .validate()
            .errors
            .iter()
            .any(|e| matches!(e, GroupError::InertiaNotNormal { .. })));
    }

    #[test]
    fn serde_round_trip() {
        let g = samples::c7c3();
        let s = serde_json::to_string(&g).unwrap();
        let back: GroupData = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }
}
