//! Numeric utilities for representations given with a monodromy operator:
//! decomposition data keyed by the size of the Jordan blocks, the
//! weight-monodromy absolute-value check, and recovery of the full
//! decomposition from the eigenvalues on the monodromy kernel by weight
//! splitting.
//!
//! Weight conditions are archimedean statements about absolute values, so
//! this module works in floating complex arithmetic only; exact values are
//! embedded before use. All checks concern the one fixed embedding.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weilmodel::ComplexWire;

/// Default relative tolerance for placing an eigenvalue on the weight grid.
pub const WEIGHT_TOL: f64 = 1e-8;

#[derive(Error, Debug)]
pub enum WdError {
    #[error("residue size {q} must be at least 2")]
    BadResidueSize { q: u64 },
    #[error("block size n = 0 is not allowed")]
    ZeroBlockSize,
    #[error("zero eigenvalue in the part with n = {n}")]
    ZeroEigenvalue { n: usize },
    #[error("eigenvalue with absolute value {abs} matches no weight on the q = {q} grid within tolerance {tol}")]
    NoWeight { abs: f64, q: u64, tol: f64 },
    #[error("eigenvalue with absolute value {abs} matches both n = {low} and n = {high}; the tolerance {tol} is too coarse")]
    AmbiguousWeight {
        abs: f64,
        low: usize,
        high: usize,
        tol: f64,
    },
}

/// One summand of the decomposition: the size n of the Jordan blocks and the
/// Frobenius eigenvalue multiset on the corresponding multiplicity space.
#[derive(Clone, Debug, PartialEq)]
pub struct WDPart {
    pub n: usize,
    pub eigs: Vec<Complex64>,
}

/// Decomposition data over residue size q. Parts are merged so block sizes
/// are distinct and sorted; eigenvalues must be nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct WDData {
    q: u64,
    parts: Vec<WDPart>,
}

impl WDData {
    pub fn new(q: u64, parts: Vec<WDPart>) -> Result<WDData, WdError> {
        if q < 2 {
            return Err(WdError::BadResidueSize { q });
        }
        let mut merged: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        for part in parts {
            if part.n == 0 {
                return Err(WdError::ZeroBlockSize);
            }
            if part.eigs.iter().any(|a| a.norm() == 0.0) {
                return Err(WdError::ZeroEigenvalue { n: part.n });
            }
            merged.entry(part.n).or_default().extend(part.eigs);
        }
        merged.retain(|_, eigs| !eigs.is_empty());
        Ok(WDData {
            q,
            parts: merged
                .into_iter()
                .map(|(n, eigs)| WDPart { n, eigs })
                .collect(),
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn parts(&self) -> &[WDPart] {
        &self.parts
    }

    /// The eigenvalues of Frobenius on the monodromy kernel: all parts
    /// flattened.
    pub fn kernel_eigenvalues(&self) -> Vec<Complex64> {
        self.parts.iter().flat_map(|p| p.eigs.clone()).collect()
    }
}

/// The absolute value required of eigenvalues in the part with block size n.
fn expected_abs(q: u64, n: usize) -> f64 {
    (q as f64).powf((n as f64 - 1.0) / 2.0)
}

fn within(abs: f64, expected: f64, tol: f64) -> bool {
    (abs - expected).abs() <= tol * expected.max(1.0)
}

/// Verdict for one part of a weight check.
#[derive(Clone, Debug)]
pub struct WmPartVerdict {
    pub n: usize,
    pub expected: f64,
    pub total: usize,
    pub failing: Vec<Complex64>,
}

impl WmPartVerdict {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }
}

/// Report of a weight-monodromy compatibility check.
#[derive(Clone, Debug)]
pub struct WmReport {
    pub parts: Vec<WmPartVerdict>,
}

impl WmReport {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|p| p.passed())
    }
}

impl std::fmt::Display for WmReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for part in &self.parts {
            if part.passed() {
                writeln!(
                    out,
                    "part n = {}: expected |eig| = {:.6}: ok ({} eigenvalues)",
                    part.n, part.expected, part.total
                )?;
            } else {
                writeln!(
                    out,
                    "part n = {}: expected |eig| = {:.6}: {} of {} eigenvalues off the weight",
                    part.n,
                    part.expected,
                    part.failing.len(),
                    part.total
                )?;
            }
        }
        if self.parts.is_empty() {
            writeln!(out, "no parts")?;
        }
        Ok(())
    }
}

/// Checks that every eigenvalue in the part with block size n has absolute
/// value q^((n-1)/2), within the relative tolerance. Failures are reported,
/// not raised.
pub fn wm_check(wd: &WDData, tol: f64) -> WmReport {
    let parts = wd
        .parts
        .iter()
        .map(|part| {
            let expected = expected_abs(wd.q, part.n);
            let failing = part
                .eigs
                .iter()
                .copied()
                .filter(|a| !within(a.norm(), expected, tol))
                .collect();
            WmPartVerdict {
                n: part.n,
                expected,
                total: part.eigs.len(),
                failing,
            }
        })
        .collect();
    WmReport { parts }
}

/// Rebuilds decomposition data from the eigenvalues on the monodromy kernel:
/// each eigenvalue is assigned the unique block size n with |eig| close to
/// q^((n-1)/2). An eigenvalue matching no grid point, or more than one, is an
/// error.
pub fn wd_from_kernel(
    q: u64,
    eigenvalues: &[Complex64],
    tol: f64,
) -> Result<WDData, WdError> {
    if q < 2 {
        return Err(WdError::BadResidueSize { q });
    }
    let mut groups: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for &a in eigenvalues {
        let abs = a.norm();
        if abs == 0.0 {
            return Err(WdError::NoWeight { abs, q, tol });
        }
        let guess = 1.0 + 2.0 * abs.ln() / (q as f64).ln();
        let center = guess.round().max(1.0) as usize;
        let matches: Vec<usize> = (center.saturating_sub(1).max(1)..=center + 1)
            .filter(|&n| within(abs, expected_abs(q, n), tol))
            .collect();
        match matches.as_slice() {
            [] => return Err(WdError::NoWeight { abs, q, tol }),
            [n] => groups.entry(*n).or_default().push(a),
            more => {
                return Err(WdError::AmbiguousWeight {
                    abs,
                    low: more[0],
                    high: more[more.len() - 1],
                    tol,
                })
            }
        }
    }
    WDData::new(
        q,
        groups
            .into_iter()
            .map(|(n, eigs)| WDPart { n, eigs })
            .collect(),
    )
}

/// The trace of the r-th power of Frobenius on the monodromy kernel: the sum
/// of the r-th powers of all eigenvalues.
pub fn kernel_trace(wd: &WDData, r: u32) -> Complex64 {
    wd.parts
        .iter()
        .flat_map(|p| &p.eigs)
        .map(|a| a.powi(r as i32))
        .sum()
}

/// Compares decomposition data part by part, matching eigenvalue multisets
/// within the relative tolerance.
pub fn wd_approx_eq(a: &WDData, b: &WDData, tol: f64) -> bool {
    if a.q != b.q || a.parts.len() != b.parts.len() {
        return false;
    }
    a.parts.iter().zip(&b.parts).all(|(x, y)| {
        if x.n != y.n || x.eigs.len() != y.eigs.len() {
            return false;
        }
        let mut used = vec![false; y.eigs.len()];
        x.eigs.iter().all(|v| {
            match (0..y.eigs.len()).find(|&j| {
                !used[j] && (v - y.eigs[j]).norm() <= tol * v.norm().max(y.eigs[j].norm()).max(1.0)
            }) {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    })
}

#[derive(Serialize, Deserialize)]
struct WDPartWire {
    n: usize,
    eigs: Vec<ComplexWire>,
}

#[derive(Serialize, Deserialize)]
struct WDWire {
    q: u64,
    parts: Vec<WDPartWire>,
}

impl Serialize for WDData {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        WDWire {
            q: self.q,
            parts: self
                .parts
                .iter()
                .map(|p| WDPartWire {
                    n: p.n,
                    eigs: p.eigs.iter().map(|&a| a.into()).collect(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for WDData {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = WDWire::deserialize(de)?;
        WDData::new(
            raw.q,
            raw.parts
                .into_iter()
                .map(|p| WDPart {
                    n: p.n,
                    eigs: p.eigs.into_iter().map(Complex64::from).collect(),
                })
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Draws weight-monodromy compatible decomposition data: a few parts with
/// block sizes up to 4 and eigenvalues of the correct absolute value at
/// random angles.
pub fn sample_wd(rng: &mut impl rand::Rng, q: u64) -> WDData {
    let mut parts = Vec::new();
    for n in 1..=4usize {
        let count = rng.gen_range(0..=2);
        if count == 0 {
            continue;
        }
        let radius = expected_abs(q, n);
        let eigs = (0..count)
            .map(|_| {
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(radius, theta)
            })
            .collect();
        parts.push(WDPart { n, eigs });
    }
    WDData::new(q, parts).unwrap()
}
