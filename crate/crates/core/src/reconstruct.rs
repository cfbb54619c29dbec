//! Recovery of a semisimple representation from its traces: partition of the
//! irreducible characters into unramified-twist orbits, extraction of the
//! power sums of each unramified part from trace data, and conversion of
//! power sums into eigenvalue multisets through Newton's identities.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::cyclo::poly::CPoly;
use crate::cyclo::roots::{self, RootError};
use crate::cyclo::CycloNum;
use crate::groups::chartab::CharTableError;
use crate::groups::{CharTable, GroupData};
use crate::weilmodel::{
    FieldSlot, LocalShape, ModelError, Scalar, TableCtx, TraceDataset, WeilComponent, WeilRep,
};

/// Absolute clustering tolerance for floating-point roots, scaled by the
/// largest root magnitude.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Threshold below which a floating-point root counts as zero, scaled by the
/// largest root magnitude.
pub const ZERO_ROOT_TOL: f64 = 1e-9;

/// Two root clusters closer than this multiple of the clustering tolerance
/// cannot be told apart from one multiple root.
pub const AMBIGUITY_FACTOR: f64 = 3.0;

#[derive(Error, Debug)]
pub enum ReconstructError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("character table does not fit the group: {0}")]
    Table(#[from] CharTableError),
    #[error("twist of row {row} by the unramified character {t} is not a table row")]
    TwistNotInTable { row: usize, t: usize },
    #[error("inertia self-product of row {row} is not a positive integer")]
    NonIntegralInnerProduct { row: usize },
    #[error("row {row}: inertia inner product {inner} disagrees with twist stabilizer order {stab}")]
    StabilizerMismatch { row: usize, inner: usize, stab: usize },
    #[error("orbit of row {rep} has size {size} with m = {m}, but size*m must equal f = {f}")]
    OrbitSizeMismatch { rep: usize, size: usize, m: usize, f: usize },
    #[error("dataset is missing entries at residue degree {r} for elements {missing:?}")]
    MissingEntries { r: usize, missing: Vec<usize> },
    #[error("polynomial does not split into linear factors over conductor {conductor} ({missing} roots not found)")]
    NotSplit { conductor: u32, missing: usize },
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("root clusters separated by {separation:.3e} are too close to the tolerance {tol:.3e} to assign multiplicities")]
    ClusterAmbiguity { separation: f64, tol: f64 },
    #[error("reconstructed dimension {got} exceeds the bound {bound}")]
    DimExceeded { got: u64, bound: u64 },
}

// ----------------------------------------------------------------------------
// Twist orbits.
// ----------------------------------------------------------------------------

/// An orbit of irreducible characters under tensoring with the characters of
/// the unramified quotient. The representative is the smallest row index, and
/// m is both the inertia self-intersection number of the representative and
/// the order of its twist stabilizer; orbit size times m equals f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistOrbit {
    pub rep: usize,
    pub m: usize,
    pub members: Vec<usize>,
}

/// Partitions the rows of a validated character table into unramified-twist
/// orbits. The multiplicity m is computed independently as an inner product
/// over inertia and as a stabilizer order; a mismatch, a twist that is not a
/// table row, or a non-integral inner product all signal a corrupted table.
pub fn twist_orbits(
    table: &CharTable,
    shape: &LocalShape,
) -> Result<Vec<TwistOrbit>, ReconstructError> {
    let group = shape.group();
    table.validate(group)?;
    let col_of = table.column_map(group)?;
    let f = shape.f();
    let rows = table.rows.len();

    let class_degrees: Vec<usize> = table
        .classes
        .iter()
        .map(|c| shape.degree(c.rep))
        .collect::<Result<_, _>>()?;
    let twist_units: Vec<Vec<CycloNum>> = (0..f)
        .map(|t| {
            class_degrees
                .iter()
                .map(|&d| CycloNum::root_of_unity(f as u32, (t * d) as i64))
                .collect()
        })
        .collect();

    let twist_of = |row: usize, t: usize| -> Vec<CycloNum> {
        table.rows[row]
            .iter()
            .zip(&twist_units[t])
            .map(|(v, u)| v.mul(u))
            .collect()
    };
    let find_row = |values: &[CycloNum]| -> Option<usize> {
        (0..rows).find(|&j| table.rows[j] == values)
    };

    let inertia = &group.inertia;
    let mut orbit_of = vec![usize::MAX; rows];
    let mut orbits = Vec::new();
    for i in 0..rows {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut members = BTreeSet::new();
        let mut stab = 0usize;
        for t in 0..f {
            let twisted = twist_of(i, t);
            let j = find_row(&twisted).ok_or(ReconstructError::TwistNotInTable { row: i, t })?;
            members.insert(j);
            if j == i {
                stab += 1;
            }
        }

        let mut dot = CycloNum::zero();
        for &h in inertia {
            let v = &table.rows[i][col_of[h]];
            dot = dot.add(&v.mul(&v.conj()));
        }
        let inner = dot
            .div_int(inertia.len() as u32)
            .as_rational()
            .filter(|v| v.is_integer())
            .map(|v| v.to_integer())
            .and_then(|v| v.to_usize())
            .filter(|&v| v > 0)
            .ok_or(ReconstructError::NonIntegralInnerProduct { row: i })?;
        if inner != stab {
            return Err(ReconstructError::StabilizerMismatch { row: i, inner, stab });
        }

        let members: Vec<usize> = members.into_iter().collect();
        if members.len() * inner != f {
            return Err(ReconstructError::OrbitSizeMismatch {
                rep: members[0],
                size: members.len(),
                m: inner,
                f,
            });
        }
        for &j in &members {
            orbit_of[j] = orbits.len();
        }
        orbits.push(TwistOrbit {
            rep: members[0],
            m: inner,
            members,
        });
    }
    Ok(orbits)
}

// ----------------------------------------------------------------------------
// Power sums and Newton's identities.
// ----------------------------------------------------------------------------

/// The power sums of one unramified part: values p_d for d = 1..N, where p_d
/// is the trace of the part at the (d*m)-th power of Frobenius.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSumSeries<S> {
    pub orbit: usize,
    pub values: Vec<S>,
}

/// Extracts p_d for one orbit from trace data: the conjugated character of
/// the orbit representative is paired with the traces over the coset of
/// degree d*m, and the sum is divided by |I| times m. Requires an entry for
/// every element of the coset at residue degree d*m.
pub fn psi_power_sum<S: Scalar>(
    orbit: &TwistOrbit,
    d: usize,
    data: &TraceDataset<S>,
    ctx: &TableCtx<S>,
    shape: &LocalShape,
) -> Result<S, ReconstructError> {
    let r = d * orbit.m;
    let coset = shape.elements_of_degree(r);
    let missing: Vec<usize> = coset
        .iter()
        .copied()
        .filter(|&g| data.get(g, r).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(ReconstructError::MissingEntries { r, missing });
    }
    let mut sum = S::zero();
    for &g in coset {
        let chi = ctx.value(orbit.rep, g);
        sum = sum.add(&chi.conj().mul(data.get(g, r).unwrap()));
    }
    let inertia_order = shape.group().inertia_order();
    Ok(sum.scale_div((inertia_order * orbit.m) as u32))
}

fn power_sum_series<S: Scalar>(
    orbit: &TwistOrbit,
    n: usize,
    data: &TraceDataset<S>,
    ctx: &TableCtx<S>,
    shape: &LocalShape,
) -> Result<PowerSumSeries<S>, ReconstructError> {
    let values = (1..=n)
        .map(|d| psi_power_sum(orbit, d, data, ctx, shape))
        .collect::<Result<_, _>>()?;
    Ok(PowerSumSeries {
        orbit: orbit.rep,
        values,
    })
}

/// Newton's identities: elementary symmetric functions e_1..e_N from power
/// sums p_1..p_N, via k*e_k = sum of (-1)^(j-1) e_(k-j) p_j.
fn newton_elementary<S: Scalar>(p: &[S]) -> Vec<S> {
    let n = p.len();
    let mut e = vec![S::one()];
    for k in 1..=n {
        let mut acc = S::zero();
        for j in 1..=k {
            let term = e[k - j].mul(&p[j - 1]);
            if j % 2 == 1 {
                acc = acc.add(&term);
            } else {
                acc = acc.sub(&term);
            }
        }
        e.push(acc.scale_div(k as u32));
    }
    e
}

/// Ascending coefficients of the monic polynomial whose roots have the given
/// elementary symmetric functions: the coefficient of x^(N-k) is (-1)^k e_k.
fn monic_from_elementary<S: Scalar>(e: &[S]) -> Vec<S> {
    let n = e.len() - 1;
    let mut coeffs = vec![S::zero(); n + 1];
    for (k, ek) in e.iter().enumerate() {
        coeffs[n - k] = if k % 2 == 0 { ek.clone() } else { ek.neg() };
    }
    coeffs
}

/// Recovers the nonzero eigenvalue multiset with power sums p_1..p_N in exact
/// arithmetic. The zero roots of the Newton polynomial are stripped by
/// exponent count; the rest must split into linear factors over the
/// cyclotomic field of the given conductor.
pub fn eigenvalues_from_power_sums(
    p: &[CycloNum],
    conductor: u32,
) -> Result<Vec<(CycloNum, usize)>, ReconstructError> {
    let coeffs = monic_from_elementary(&newton_elementary(p));
    let zeros = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let poly = CPoly::new(coeffs[zeros..].to_vec());
    let l = arith::lcm_u64(conductor as u64, poly.coeff_conductor_lcm() as u64) as u32;
    if poly.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let found = roots::roots_in_field(&poly, l)?;
    if found.missing > 0 {
        return Err(ReconstructError::NotSplit {
            conductor: l,
            missing: found.missing,
        });
    }
    let mut out = found.roots;
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Floating-point counterpart: roots of the Newton polynomial by simultaneous
/// iteration, followed by zero stripping and clustering. Cluster centers
/// closer together than `AMBIGUITY_FACTOR` times the clustering tolerance are
/// rejected, since the multiplicity split is then unreliable.
pub fn eigenvalues_from_power_sums_float(
    p: &[Complex64],
) -> Result<Vec<(Complex64, usize)>, ReconstructError> {
    let coeffs = monic_from_elementary(&newton_elementary(p));
    let raw = aberth_roots(&coeffs);
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    let scale = raw.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut nonzero: Vec<Complex64> = raw
        .into_iter()
        .filter(|z| z.norm() > ZERO_ROOT_TOL * scale)
        .collect();
    nonzero.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let tol = CLUSTER_TOL * scale;
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in nonzero {
        match clusters
            .iter_mut()
            .find(|(center, _)| (*center - z).norm() <= tol)
        {
            Some((center, count)) => {
                *center = (*center * *count as f64 + z) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let separation = (clusters[i].0 - clusters[j].0).norm();
            if separation < AMBIGUITY_FACTOR * tol {
                return Err(ReconstructError::ClusterAmbiguity { separation, tol });
            }
        }
    }
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(clusters)
}

fn horner_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * (0.5 + 0.5 * (k + 1) as f64 / n as f64), angle)
        })
        .collect();
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner_pair(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() > 1e-300 {
                p / dp
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 1e-300 { w / denom } else { w };
            z[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-14 * radius {
            break;
        }
    }
    z
}

// ----------------------------------------------------------------------------
// Reconstruction.
// ----------------------------------------------------------------------------

/// Options for the reconstruction. `split_conductor` widens the cyclotomic
/// field in which eigenvalues are sought beyond the default, the exponent of
/// the group; the field of the polynomial coefficients is always adjoined.
/// `mu_conductor` does the same for the field searched for m-th roots of the
/// eigenvalues, whose default is the exponent joined with the eigenvalue
/// field. `emit_mu` disables the root search entirely when false.
#[derive(Clone, Debug)]
pub struct ReconstructConfig {
    pub split_conductor: Option<u32>,
    pub mu_conductor: Option<u32>,
    pub emit_mu: bool,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig {
            split_conductor: None,
            mu_conductor: None,
            emit_mu: true,
        }
    }
}

/// Result of the reconstruction for one orbit: the representative character,
/// its twist multiplicity, the canonical eigenvalue multiset of the
/// unramified part at the m-th power of Frobenius, and, when a root could be
/// chosen, eigenvalues at Frobenius itself.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitResult<S> {
    pub rep_char: usize,
    pub m: usize,
    pub lambda: Vec<S>,
    pub mu: Option<Vec<S>>,
}

/// Full reconstruction output. Orbits with nothing attached are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction<S: Scalar> {
    pub orbits: Vec<OrbitResult<S>>,
    pub dim_bound: u64,
}

impl<S: Scalar> Reconstruction<S> {
    /// The choice-free invariant: eigenvalue multisets keyed by orbit
    /// representative.
    pub fn canonical(&self) -> CanonicalRep<S> {
        CanonicalRep {
            entries: self
                .orbits
                .iter()
                .map(|o| (o.rep_char, o.lambda.clone()))
                .collect(),
        }
    }

    /// Concrete representation assembled from the chosen roots; absent if any
    /// orbit is missing them.
    pub fn weil_rep(&self) -> Option<WeilRep<S>> {
        let mut components = Vec::new();
        for orbit in &self.orbits {
            let mu = orbit.mu.as_ref()?;
            components.push(WeilComponent {
                row: orbit.rep_char,
                m: orbit.m,
                mu: mu.clone(),
            });
        }
        Some(WeilRep { components })
    }

    /// Total dimension of the reconstructed representation.
    pub fn dim(&self, ctx: &TableCtx<S>) -> u64 {
        self.orbits
            .iter()
            .map(|o| ctx.degree(o.rep_char) * o.lambda.len() as u64)
            .sum()
    }
}

/// The equality-complete invariant of a reconstruction: for each orbit with a
/// nonzero unramified part, the multiset of eigenvalues at the m-th power of
/// Frobenius. Orbits not listed carry the zero representation.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalRep<S> {
    pub entries: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> CanonicalRep<S> {
    pub fn get(&self, rep_char: usize) -> &[S] {
        self.entries
            .iter()
            .find(|(r, _)| *r == rep_char)
            .map(|(_, l)| l.as_slice())
            .unwrap_or(&[])
    }
}

/// Compares two canonical forms as orbit-indexed multisets, exactly in exact
/// mode and by tolerance matching in floating mode. Orbits missing on either
/// side count as empty.
pub fn rep_equal<S: Scalar>(a: &CanonicalRep<S>, b: &CanonicalRep<S>, tol: f64) -> bool {
    let keys: BTreeSet<usize> = a
        .entries
        .iter()
        .chain(b.entries.iter())
        .map(|(r, _)| *r)
        .collect();
    keys.into_iter().all(|key| {
        let left = a.get(key);
        let right = b.get(key);
        if left.len() != right.len() {
            return false;
        }
        if S::EXACT {
            let mut left = left.to_vec();
            let mut right = right.to_vec();
            left.sort_by(|x, y| x.canonical_cmp(y));
            right.sort_by(|x, y| x.canonical_cmp(y));
            left == right
        } else {
            let mut used = vec![false; right.len()];
            left.iter().all(|v| {
                match (0..right.len()).find(|&j| !used[j] && v.approx_eq(&right[j], tol)) {
                    Some(j) => {
                        used[j] = true;
                        true
                    }
                    None => false,
                }
            })
        }
    })
}

/// Canonical form of a representation whose components sit at orbit
/// representatives: each eigenvalue is raised to the m-th power and the
/// multisets are merged per row.
pub fn canonical_form<S: Scalar>(rep: &WeilRep<S>) -> CanonicalRep<S> {
    let mut entries: Vec<(usize, Vec<S>)> = Vec::new();
    for comp in &rep.components {
        if comp.mu.is_empty() {
            continue;
        }
        let lambdas = comp.mu.iter().map(|mu| mu.powu(comp.m as u64));
        match entries.iter_mut().find(|(r, _)| *r == comp.row) {
            Some((_, list)) => list.extend(lambdas),
            None => entries.push((comp.row, lambdas.collect())),
        }
    }
    for (_, list) in entries.iter_mut() {
        list.sort_by(|x, y| x.canonical_cmp(y));
    }
    entries.sort_by_key(|(r, _)| *r);
    CanonicalRep { entries }
}

/// Every slot the reconstruction will query for the given orbits and
/// dimension bound: for each orbit, the cosets of degree d*m for d up to the
/// per-orbit bound.
pub fn required_slots<S: Scalar>(
    ctx: &TableCtx<S>,
    shape: &LocalShape,
    orbits: &[TwistOrbit],
    dim_bound: u64,
) -> Vec<FieldSlot> {
    let mut slots = BTreeSet::new();
    for orbit in orbits {
        let n = (dim_bound / ctx.degree(orbit.rep)) as usize;
        for d in 1..=n {
            let r = d * orbit.m;
            for &g in shape.elements_of_degree(r) {
                slots.insert(FieldSlot { g, r });
            }
        }
    }
    slots.into_iter().collect()
}

fn reconstruct_core<S: Scalar>(
    data: &TraceDataset<S>,
    table: &CharTable,
    shape: &LocalShape,
    dim_bound: u64,
    eigen: impl Fn(&[S]) -> Result<Vec<(S, usize)>, ReconstructError>,
    mu_root: impl Fn(&S, usize) -> Option<S>,
    emit_mu: bool,
) -> Result<Reconstruction<S>, ReconstructError> {
    let ctx = TableCtx::new(table, shape)?;
    let orbits = twist_orbits(table, shape)?;
    let mut results = Vec::new();
    let mut total = 0u64;
    for orbit in &orbits {
        let n = (dim_bound / ctx.degree(orbit.rep)) as usize;
        if n == 0 {
            continue;
        }
        let series = power_sum_series(orbit, n, data, &ctx, shape)?;
        let eigenvalues = eigen(&series.values)?;
        if eigenvalues.is_empty() {
            continue;
        }
        let mut lambda = Vec::new();
        for (value, count) in &eigenvalues {
            lambda.extend(std::iter::repeat(value.clone()).take(*count));
        }
        total += ctx.degree(orbit.rep) * lambda.len() as u64;
        let mu = if emit_mu {
            lambda
                .iter()
                .map(|l| mu_root(l, orbit.m))
                .collect::<Option<Vec<_>>>()
        } else {
            None
        };
        results.push(OrbitResult {
            rep_char: orbit.rep,
            m: orbit.m,
            lambda,
            mu,
        });
    }
    if total > dim_bound {
        return Err(ReconstructError::DimExceeded {
            got: total,
            bound: dim_bound,
        });
    }
    Ok(Reconstruction {
        orbits: results,
        dim_bound,
    })
}

/// Exact reconstruction: every orbit's power sums are converted to an
/// eigenvalue multiset over the configured cyclotomic field, and m-th roots
/// of the eigenvalues are attached when they exist in the configured root
/// field, picking the smallest root in the canonical order.
pub fn reconstruct_exact(
    data: &TraceDataset<CycloNum>,
    table: &CharTable,
    shape: &LocalShape,
    dim_bound: u64,
    config: &ReconstructConfig,
) -> Result<Reconstruction<CycloNum>, ReconstructError> {
    let exponent = shape.group().exponent() as u32;
    let split = config.split_conductor.unwrap_or(exponent);
    let mu_base = config.mu_conductor;
    reconstruct_core(
        data,
        table,
        shape,
        dim_bound,
        |p| eigenvalues_from_power_sums(p, split),
        |lambda, m| {
            if m == 1 {
                return Some(lambda.clone());
            }
            let base = mu_base.unwrap_or(exponent);
            let l = arith::lcm_u64(base as u64, lambda.conductor() as u64) as u32;
            let mut coeffs = vec![lambda.neg()];
            coeffs.extend(std::iter::repeat(CycloNum::zero()).take(m - 1));
            coeffs.push(CycloNum::one());
            let found = roots::roots_in_field(&CPoly::new(coeffs), l).ok()?;
            found.roots.into_iter().map(|(root, _)| root).min()
        },
        config.emit_mu,
    )
}

/// Floating-point reconstruction: eigenvalues by simultaneous root iteration
/// and clustering, with the m-th root taken as the principal one, argument in
/// [0, 2*pi/m).
pub fn reconstruct_float(
    data: &TraceDataset<Complex64>,
    table: &CharTable,
    shape: &LocalShape,
    dim_bound: u64,
    config: &ReconstructConfig,
) -> Result<Reconstruction<Complex64>, ReconstructError> {
    reconstruct_core(
        data,
        table,
        shape,
        dim_bound,
        |p| eigenvalues_from_power_sums_float(p),
        |lambda, m| {
            let (r, mut theta) = lambda.to_polar();
            if theta < 0.0 {
                theta += 2.0 * std::f64::consts::PI;
            }
            Some(Complex64::from_polar(r.powf(1.0 / m as f64), theta / m as f64))
        },
        config.emit_mu,
    )
}

// ----------------------------------------------------------------------------
// Output serialization.
// ----------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(bound = "")]
struct OrbitOut<'a, S: Scalar> {
    rep_char: usize,
    m: usize,
    lambda: Vec<WireOutVal<'a, S>>,
    mu: Option<Vec<WireOutVal<'a, S>>>,
}

struct WireOutVal<'a, S: Scalar>(&'a S);

impl<S: Scalar> Serialize for WireOutVal<'_, S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        self.0.wire_serialize(ser)
    }
}

struct WireInVal<S: Scalar>(S);

impl<'de, S: Scalar> Deserialize<'de> for WireInVal<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        S::wire_deserialize(de).map(WireInVal)
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct ReconstructionOut<'a, S: Scalar> {
    orbits: Vec<OrbitOut<'a, S>>,
    dim: u64,
    mode: &'static str,
}

impl<S: Scalar> Serialize for Reconstruction<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        let orbits = self
            .orbits
            .iter()
            .map(|o| OrbitOut {
                rep_char: o.rep_char,
                m: o.m,
                lambda: o.lambda.iter().map(WireOutVal).collect(),
                mu: o.mu.as_ref().map(|l| l.iter().map(WireOutVal).collect()),
            })
            .collect();
        ReconstructionOut {
            orbits,
            dim: self.dim_bound,
            mode: if S::EXACT { "exact" } else { "float" },
        }
        .serialize(ser)
    }
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct OrbitIn<S: Scalar> {
    rep_char: usize,
    m: usize,
    lambda: Vec<WireInVal<S>>,
    mu: Option<Vec<WireInVal<S>>>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct ReconstructionIn<S: Scalar> {
    orbits: Vec<OrbitIn<S>>,
    dim: u64,
    mode: String,
}

impl<'de, S: Scalar> Deserialize<'de> for Reconstruction<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = ReconstructionIn::<S>::deserialize(de)?;
        let expected = if S::EXACT { "exact" } else { "float" };
        if raw.mode != expected {
            return Err(serde::de::Error::custom(format!(
                "mode is {:?} but this reader is {}",
                raw.mode, expected
            )));
        }
        Ok(Reconstruction {
            orbits: raw
                .orbits
                .into_iter()
                .map(|o| OrbitResult {
                    rep_char: o.rep_char,
                    m: o.m,
                    lambda: o.lambda.into_iter().map(|v| v.0).collect(),
                    mu: o.mu.map(|l| l.into_iter().map(|v| v.0).collect()),
                })
                .collect(),
            dim_bound: raw.dim,
        })
    }
}

// ----------------------------------------------------------------------------
// Round-trip testing: sample a representation, evaluate its traces, rebuild
// it, and compare canonical forms.
// ----------------------------------------------------------------------------

/// Dimension budget used by the round-trip sampler.
pub const ROUNDTRIP_DIM: u64 = 12;

const SAMPLE_CONDUCTORS: [u32; 8] = [1, 2, 3, 4, 6, 8, 12, 24];
const SAMPLE_SCALES: [(i64, i64); 9] = [
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (3, 1),
    (1, 2),
    (-1, 2),
    (5, 1),
    (3, 2),
];

fn sample_mu(rng: &mut ChaCha8Rng) -> CycloNum {
    let conductor = *SAMPLE_CONDUCTORS.choose(rng).unwrap();
    let (num, den) = *SAMPLE_SCALES.choose(rng).unwrap();
    let scale = CycloNum::from_int(num).div(&CycloNum::from_int(den)).unwrap();
    let power = rng.gen_range(0..conductor) as i64;
    scale.mul(&CycloNum::root_of_unity(conductor, power))
}

/// Draws a random representation supported on orbit representatives with
/// total dimension at most the budget. The zero representation is a
/// legitimate, occasional sample.
pub fn sample_rep(
    rng: &mut ChaCha8Rng,
    ctx: &TableCtx<CycloNum>,
    orbits: &[TwistOrbit],
    dim_bound: u64,
) -> WeilRep<CycloNum> {
    let mut order: Vec<usize> = (0..orbits.len()).collect();
    order.shuffle(rng);
    let mut remaining = dim_bound;
    let mut components = Vec::new();
    for &idx in &order {
        let orbit = &orbits[idx];
        let deg = ctx.degree(orbit.rep);
        if deg > remaining {
            continue;
        }
        let cap = (remaining / deg).min(4);
        let count = rng.gen_range(0..=cap);
        if count == 0 {
            continue;
        }
        let mu: Vec<CycloNum> = (0..count).map(|_| sample_mu(rng)).collect();
        remaining -= deg * count;
        components.push(WeilComponent {
            row: orbit.rep,
            m: orbit.m,
            mu,
        });
    }
    WeilRep { components }
}

/// One precomputed shape for round-trip testing.
pub struct RoundTripShape {
    pub label: &'static str,
    pub shape: LocalShape,
    pub table: CharTable,
}

/// The standard set of shapes exercised by round-trip testing: ramified and
/// unramified parts of several sizes, with both abelian and non-abelian
/// inertia quotient structure.
pub fn roundtrip_shapes() -> Vec<RoundTripShape> {
    use crate::groups::samples;
    let builds: [(&'static str, GroupData, u64); 5] = [
        ("c7:c3 over q=7", samples::c7c3(), 7),
        ("d4 over q=3", samples::dihedral(4), 3),
        ("c6, inertia c2, q=5", samples::cyclic(6, 2), 5),
        ("c6, inertia c3, q=5", samples::cyclic(6, 3), 5),
        ("s3, inertia a3, q=3", samples::dihedral(3), 3),
    ];
    builds
        .into_iter()
        .map(|(label, group, q)| {
            let table = CharTable::compute(&group).unwrap();
            let shape = LocalShape::new(group, q).unwrap();
            RoundTripShape { label, shape, table }
        })
        .collect()
}

/// Samples a representation on the given shape, generates its trace dataset,
/// reconstructs, and compares canonical forms. Returns a description of the
/// mismatch on failure.
pub fn roundtrip_trial(entry: &RoundTripShape, seed: u64, dim_bound: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = TableCtx::<CycloNum>::new(&entry.table, &entry.shape).map_err(|e| e.to_string())?;
    let orbits = twist_orbits(&entry.table, &entry.shape).map_err(|e| e.to_string())?;
    let rep = sample_rep(&mut rng, &ctx, &orbits, dim_bound);
    let slots = required_slots(&ctx, &entry.shape, &orbits, dim_bound);
    let data = rep
        .dataset(&ctx, &entry.shape, &slots)
        .map_err(|e| e.to_string())?;
    let config = ReconstructConfig {
        split_conductor: Some(24),
        mu_conductor: None,
        emit_mu: false,
    };
    let result = reconstruct_exact(&data, &entry.table, &entry.shape, dim_bound, &config)
        .map_err(|e| format!("{}: seed {}: {}", entry.label, seed, e))?;
    let expected = canonical_form(&rep);
    if rep_equal(&expected, &result.canonical(), 0.0) {
        Ok(())
    } else {
        Err(format!(
            "{}: seed {}: expected {:?}, got {:?}",
            entry.label,
            seed,
            expected,
            result.canonical()
        ))
    }
}

/// Outcome of a batch of round-trip trials.
pub struct RoundTripReport {
    pub trials: usize,
    pub failures: Vec<String>,
}

impl RoundTripReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs round-trip trials in parallel, spread over the given shapes, with
/// per-trial seeds derived from the base seed. Failures come back sorted so
/// the report does not depend on scheduling.
pub fn run_roundtrip(shapes: &[RoundTripShape], trials: usize, base_seed: u64, dim_bound: u64) -> RoundTripReport {
    let mut failures: Vec<String> = (0..trials)
        .into_par_iter()
        .filter_map(|i| {
            let entry = &shapes[i % shapes.len()];
            let seed = base_seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            roundtrip_trial(entry, seed, dim_bound).err()
        })
        .collect();
    failures.sort();
    RoundTripReport { trials, failures }
}
