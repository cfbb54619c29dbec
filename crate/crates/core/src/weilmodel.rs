//! Finite model of the representations under study: a shape (finite quotient
//! group together with the residue size of the base field), field slots
//! indexing the finite extensions where traces are taken, trace datasets in
//! exact or floating scalars, and the forward trace oracle for semisimple
//! representations given as twisted sums.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::cyclo::CycloNum;
use crate::groups::chartab::CharTableError;
use crate::groups::{CharTable, GroupData, GroupError};

/// Relative tolerance for agreement of duplicate entries in a floating-point
/// trace dataset.
pub const DUPLICATE_TOL: f64 = 1e-9;

#[derive(Error, Debug)]
pub enum ModelError {
    #[error("residue size {q} is not a prime power")]
    NotPrimePower { q: u64 },
    #[error("invalid group: {0}")]
    Group(#[from] GroupError),
    #[error("character table does not fit the group: {0}")]
    Table(#[from] CharTableError),
    #[error("element {g} out of range for a group of order {order}")]
    ElementRange { g: usize, order: usize },
    #[error("slot must have positive residue degree")]
    ZeroResidueDegree,
    #[error("slot (g = {g}, r = {r}) is incompatible: element degree is {deg} but {r} = {rmodf} mod {f}")]
    SlotDegree {
        g: usize,
        r: usize,
        deg: usize,
        rmodf: usize,
        f: usize,
    },
    #[error("conflicting duplicate trace at (g = {g}, r = {r})")]
    DuplicateMismatch { g: usize, r: usize },
    #[error("component row {row} out of range for a table with {rows} rows")]
    RowRange { row: usize, rows: usize },
    #[error("component at row {row} has stabilizer order {m} which does not divide f = {f}")]
    BadStabilizerOrder { row: usize, m: usize, f: usize },
    #[error("component at row {row} has an empty eigenvalue list")]
    EmptySpectrum { row: usize },
    #[error("component at row {row} has a zero eigenvalue")]
    ZeroEigenvalue { row: usize },
}

// ----------------------------------------------------------------------------
// Scalar abstraction over the two computation modes.
// ----------------------------------------------------------------------------

/// Arithmetic interface shared by the exact cyclotomic scalars and the
/// floating complex scalars, so that trace evaluation, power sums, and the
/// Newton recursion can be written once.
///
/// `scale_div` divides by a positive integer; callers never pass zero.
/// Tolerance arguments are ignored by the exact implementation. The wire
/// methods fix the JSON form of a trace value: a cyclotomic number in exact
/// mode and a `{"re", "im"}` pair in floating mode.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn scale_div(&self, k: u32) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn from_cyclo(v: &CycloNum) -> Self;
    fn is_zero_within(&self, tol: f64) -> bool;
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    fn wire_serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error>;
    fn wire_deserialize<'de, D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error>;

    /// Total order used to present multisets deterministically. Exact values
    /// use their canonical order; floating values compare by real part then
    /// imaginary part.
    fn canonical_cmp(&self, other: &Self) -> Ordering;

    fn powu(&self, e: u64) -> Self {
        let mut base = self.clone();
        let mut e = e;
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
}

impl Scalar for CycloNum {
    const EXACT: bool = true;

    fn zero() -> Self {
        CycloNum::zero()
    }

    fn one() -> Self {
        CycloNum::one()
    }

    fn add(&self, other: &Self) -> Self {
        CycloNum::add(self, other)
    }

    fn sub(&self, other: &Self) -> Self {
        CycloNum::sub(self, other)
    }

    fn mul(&self, other: &Self) -> Self {
        CycloNum::mul(self, other)
    }

    fn neg(&self) -> Self {
        CycloNum::neg(self)
    }

    fn conj(&self) -> Self {
        CycloNum::conj(self)
    }

    fn scale_div(&self, k: u32) -> Self {
        self.div_int(k)
    }

    fn from_bigint(v: &BigInt) -> Self {
        CycloNum::from_rational(BigRational::from_integer(v.clone()))
    }

    fn from_cyclo(v: &CycloNum) -> Self {
        v.clone()
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn wire_serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        Serialize::serialize(self, ser)
    }

    fn wire_deserialize<'de, D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Deserialize::deserialize(de)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn powu(&self, e: u64) -> Self {
        CycloNum::powu(self, e)
    }
}

/// JSON form of a complex value.
#[derive(Serialize, Deserialize)]
pub(crate) struct ComplexWire {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexWire> for Complex64 {
    fn from(v: ComplexWire) -> Self {
        Complex64::new(v.re, v.im)
    }
}

impl From<Complex64> for ComplexWire {
    fn from(v: Complex64) -> Self {
        ComplexWire { re: v.re, im: v.im }
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn sub(&self, other: &Self) -> Self {
        self - other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn scale_div(&self, k: u32) -> Self {
        self / k as f64
    }

    fn from_bigint(v: &BigInt) -> Self {
        Complex64::new(v.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }

    fn from_cyclo(v: &CycloNum) -> Self {
        v.embed()
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol * (self.norm().max(other.norm())).max(1.0)
    }

    fn wire_serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ComplexWire::from(*self).serialize(ser)
    }

    fn wire_deserialize<'de, D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        ComplexWire::deserialize(de).map(Complex64::from)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.total_cmp(&other.re).then(self.im.total_cmp(&other.im))
    }
}

// ----------------------------------------------------------------------------
// Shapes and field slots.
// ----------------------------------------------------------------------------

/// A validated group together with the residue size q of the base field.
/// Caches the degree map on elements and the partition of the group by
/// degree class.
#[derive(Clone, Debug)]
pub struct LocalShape {
    group: GroupData,
    q: u64,
    degrees: Vec<usize>,
    by_degree: Vec<Vec<usize>>,
    f: usize,
}

impl LocalShape {
    pub fn new(group: GroupData, q: u64) -> Result<Self, ModelError> {
        if q < 2 || arith::factor_u64(q).len() != 1 {
            return Err(ModelError::NotPrimePower { q });
        }
        group.validate().into_result()?;
        let degrees = group.frobenius_degrees()?;
        let f = group.residue_degree();
        let mut by_degree = vec![Vec::new(); f];
        for (g, &d) in degrees.iter().enumerate() {
            by_degree[d].push(g);
        }
        Ok(LocalShape {
            group,
            q,
            degrees,
            by_degree,
            f,
        })
    }

    pub fn group(&self) -> &GroupData {
        &self.group
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Residue degree of the full extension, the order of the cyclic quotient.
    pub fn f(&self) -> usize {
        self.f
    }

    /// Degree class of an element in Z/f.
    pub fn degree(&self, g: usize) -> Result<usize, ModelError> {
        self.degrees.get(g).copied().ok_or(ModelError::ElementRange {
            g,
            order: self.group.order,
        })
    }

    /// All elements whose degree class is `d` mod f.
    pub fn elements_of_degree(&self, d: usize) -> &[usize] {
        &self.by_degree[d % self.f]
    }

    /// Checks that a slot indexes a genuine subextension: the residue degree
    /// must be positive and match the degree class of the element.
    pub fn check_slot(&self, slot: FieldSlot) -> Result<(), ModelError> {
        if slot.r == 0 {
            return Err(ModelError::ZeroResidueDegree);
        }
        let deg = self.degree(slot.g)?;
        if slot.r % self.f != deg {
            return Err(ModelError::SlotDegree {
                g: slot.g,
                r: slot.r,
                deg,
                rmodf: slot.r % self.f,
                f: self.f,
            });
        }
        Ok(())
    }

    pub fn slot(&self, g: usize, r: usize) -> Result<FieldSlot, ModelError> {
        let slot = FieldSlot { g, r };
        self.check_slot(slot)?;
        Ok(slot)
    }
}

/// Index of a finite extension of the base field: the coset element `g` and
/// the residue degree `r` of the extension. Valid slots satisfy
/// deg(g) = r mod f.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldSlot {
    pub g: usize,
    pub r: usize,
}

// ----------------------------------------------------------------------------
// Trace datasets.
// ----------------------------------------------------------------------------

/// Frobenius normalization the entries were produced with. Recorded as given
/// and never guessed; the reconstruction itself is normalization-agnostic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Arithmetic,
    Geometric,
}

/// Where a dataset entry came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntrySource {
    Direct,
    FromCount,
}

#[derive(Clone, Debug, PartialEq)]
struct DatasetEntry<S> {
    value: S,
    source: EntrySource,
}

/// Map from field slots to traces, with duplicate entries required to agree
/// exactly in exact mode and within `DUPLICATE_TOL` in floating mode.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceDataset<S: Scalar> {
    entries: BTreeMap<FieldSlot, DatasetEntry<S>>,
    convention: Convention,
}

impl<S: Scalar> Default for TraceDataset<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> TraceDataset<S> {
    pub fn new() -> Self {
        TraceDataset {
            entries: BTreeMap::new(),
            convention: Convention::Arithmetic,
        }
    }

    pub fn with_convention(convention: Convention) -> Self {
        TraceDataset {
            entries: BTreeMap::new(),
            convention,
        }
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, g: usize, r: usize) -> Option<&S> {
        self.entries.get(&FieldSlot { g, r }).map(|e| &e.value)
    }

    pub fn source(&self, g: usize, r: usize) -> Option<EntrySource> {
        self.entries.get(&FieldSlot { g, r }).map(|e| e.source)
    }

    pub fn iter(&self) -> impl Iterator<Item = (FieldSlot, &S)> {
        self.entries.iter().map(|(&k, e)| (k, &e.value))
    }

    /// Inserts an entry after checking the slot against the shape. A repeated
    /// slot keeps the first value; a disagreeing repeat is an error.
    pub fn insert(
        &mut self,
        shape: &LocalShape,
        slot: FieldSlot,
        value: S,
        source: EntrySource,
    ) -> Result<(), ModelError> {
        shape.check_slot(slot)?;
        self.merge(slot, value, source)
    }

    fn merge(&mut self, slot: FieldSlot, value: S, source: EntrySource) -> Result<(), ModelError> {
        match self.entries.get(&slot) {
            None => {
                self.entries.insert(slot, DatasetEntry { value, source });
                Ok(())
            }
            Some(existing) => {
                if existing.value.approx_eq(&value, DUPLICATE_TOL) {
                    Ok(())
                } else {
                    Err(ModelError::DuplicateMismatch { g: slot.g, r: slot.r })
                }
            }
        }
    }

    /// Checks every stored slot against a shape, for datasets that were read
    /// from a file before the shape was known.
    pub fn validate_slots(&self, shape: &LocalShape) -> Result<(), ModelError> {
        for (&slot, _) in self.entries.iter() {
            shape.check_slot(slot)?;
        }
        Ok(())
    }
}

/// Builds a consistency-checked dataset from raw (g, r, trace) triples.
pub fn dataset_from_traces<S: Scalar>(
    shape: &LocalShape,
    entries: impl IntoIterator<Item = (usize, usize, S)>,
) -> Result<TraceDataset<S>, ModelError> {
    let mut data = TraceDataset::new();
    for (g, r, value) in entries {
        data.insert(shape, FieldSlot { g, r }, value, EntrySource::Direct)?;
    }
    Ok(data)
}

/// One point count over the extension indexed by (g, r).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CountEntry {
    pub g: usize,
    pub r: usize,
    pub count: u64,
}

/// A curve point-count file: the genus and the counts per field slot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountData {
    pub genus: u32,
    pub entries: Vec<CountEntry>,
}

/// A converted count whose trace falls outside the expected range for a
/// smooth curve of the stated genus.
#[derive(Clone, Debug)]
pub struct HasseWeilWarning {
    pub g: usize,
    pub r: usize,
    pub trace: BigInt,
    pub genus: u32,
}

impl fmt::Display for HasseWeilWarning {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "trace {} at (g = {}, r = {}) exceeds the smooth-curve bound 2*{}*q^({}/2)",
            self.trace, self.g, self.r, self.genus, self.r
        )
    }
}

/// Converts point counts to traces via trace = q^r + 1 - count. Counts whose
/// trace violates the smooth-curve bound |t| <= 2g*q^(r/2) are kept but
/// reported, since twists and bad-reduction data legitimately break it.
pub fn dataset_from_counts<S: Scalar>(
    shape: &LocalShape,
    genus: u32,
    entries: &[CountEntry],
) -> Result<(TraceDataset<S>, Vec<HasseWeilWarning>), ModelError> {
    let mut data = TraceDataset::new();
    let mut warnings = Vec::new();
    let q = BigInt::from(shape.q());
    for entry in entries {
        let ql = q.pow(entry.r as u32);
        let trace: BigInt = &ql + BigInt::from(1) - BigInt::from(entry.count);
        let bound_sq = BigInt::from(4u32) * BigInt::from(genus).pow(2) * &ql;
        if trace.pow(2) > bound_sq {
            warnings.push(HasseWeilWarning {
                g: entry.g,
                r: entry.r,
                trace: trace.clone(),
                genus,
            });
        }
        data.insert(
            shape,
            FieldSlot {
                g: entry.g,
                r: entry.r,
            },
            S::from_bigint(&trace),
            EntrySource::FromCount,
        )?;
    }
    Ok((data, warnings))
}

// ----------------------------------------------------------------------------
// Dataset serialization. The wire value of a trace is either an exact
// cyclotomic number or a complex pair; a single complex entry forces the
// whole dataset into floating mode on ingest.
// ----------------------------------------------------------------------------

struct WireOut<'a, S: Scalar>(&'a S);

impl<S: Scalar> Serialize for WireOut<'_, S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        self.0.wire_serialize(ser)
    }
}

struct WireVal<S: Scalar>(S);

impl<'de, S: Scalar> Deserialize<'de> for WireVal<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        S::wire_deserialize(de).map(WireVal)
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct EntryOut<'a, S: Scalar> {
    g: usize,
    r: usize,
    trace: WireOut<'a, S>,
}

#[derive(Serialize)]
#[serde(bound = "")]
struct DatasetOut<'a, S: Scalar> {
    entries: Vec<EntryOut<'a, S>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention: Option<Convention>,
}

impl<S: Scalar> Serialize for TraceDataset<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        let entries = self
            .entries
            .iter()
            .map(|(slot, e)| EntryOut {
                g: slot.g,
                r: slot.r,
                trace: WireOut(&e.value),
            })
            .collect();
        let convention = match self.convention {
            Convention::Arithmetic => None,
            Convention::Geometric => Some(Convention::Geometric),
        };
        DatasetOut { entries, convention }.serialize(ser)
    }
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct EntryIn<S: Scalar> {
    g: usize,
    r: usize,
    trace: WireVal<S>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct DatasetIn<S: Scalar> {
    entries: Vec<EntryIn<S>>,
    #[serde(default)]
    convention: Convention,
}

impl<'de, S: Scalar> Deserialize<'de> for TraceDataset<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = DatasetIn::<S>::deserialize(de)?;
        let mut data = TraceDataset::with_convention(raw.convention);
        for entry in raw.entries {
            data.merge(
                FieldSlot {
                    g: entry.g,
                    r: entry.r,
                },
                entry.trace.0,
                EntrySource::Direct,
            )
            .map_err(serde::de::Error::custom)?;
        }
        Ok(data)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TraceIn {
    Exact(CycloNum),
    Numeric(ComplexWire),
}

#[derive(Deserialize)]
struct AnyEntryIn {
    g: usize,
    r: usize,
    trace: TraceIn,
}

#[derive(Deserialize)]
struct AnyDatasetIn {
    entries: Vec<AnyEntryIn>,
    #[serde(default)]
    convention: Convention,
}

/// A dataset read from the wire, in whichever mode the entries force.
pub enum AnyDataset {
    Exact(TraceDataset<CycloNum>),
    Numeric(TraceDataset<Complex64>),
}

impl<'de> Deserialize<'de> for AnyDataset {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = AnyDatasetIn::deserialize(de)?;
        let numeric = raw
            .entries
            .iter()
            .any(|e| matches!(e.trace, TraceIn::Numeric(_)));
        if numeric {
            let mut data = TraceDataset::with_convention(raw.convention);
            for e in raw.entries {
                let value = match e.trace {
                    TraceIn::Exact(v) => v.embed(),
                    TraceIn::Numeric(v) => v.into(),
                };
                data.merge(FieldSlot { g: e.g, r: e.r }, value, EntrySource::Direct)
                    .map_err(serde::de::Error::custom)?;
            }
            Ok(AnyDataset::Numeric(data))
        } else {
            let mut data = TraceDataset::with_convention(raw.convention);
            for e in raw.entries {
                let value = match e.trace {
                    TraceIn::Exact(v) => v,
                    TraceIn::Numeric(_) => unreachable!(),
                };
                data.merge(FieldSlot { g: e.g, r: e.r }, value, EntrySource::Direct)
                    .map_err(serde::de::Error::custom)?;
            }
            Ok(AnyDataset::Exact(data))
        }
    }
}

// ----------------------------------------------------------------------------
// Character table context and the forward trace oracle.
// ----------------------------------------------------------------------------

/// A validated character table converted into the working scalar type, with
/// the element-to-column map precomputed.
#[derive(Clone, Debug)]
pub struct TableCtx<S> {
    rows: Vec<Vec<S>>,
    col_of: Vec<usize>,
    row_degrees: Vec<u64>,
}

impl<S: Scalar> TableCtx<S> {
    pub fn new(table: &CharTable, shape: &LocalShape) -> Result<Self, ModelError> {
        let group = shape.group();
        table.validate(group)?;
        let col_of = table.column_map(group)?;
        let row_degrees = (0..table.rows.len())
            .map(|i| table.degree(group, i))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = table
            .rows
            .iter()
            .map(|row| row.iter().map(S::from_cyclo).collect())
            .collect();
        Ok(TableCtx {
            rows,
            col_of,
            row_degrees,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Character value of row `row` at the class of element `g`.
    pub fn value(&self, row: usize, g: usize) -> &S {
        &self.rows[row][self.col_of[g]]
    }

    pub fn degree(&self, row: usize) -> u64 {
        self.row_degrees[row]
    }
}

/// One summand of a semisimple representation: the table row of the
/// irreducible factor, its unramified-twist stabilizer order, and the
/// eigenvalue list of the unramified part at Frobenius.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilComponent<S> {
    pub row: usize,
    pub m: usize,
    pub mu: Vec<S>,
}

/// A semisimple representation presented as a sum of components. The trace
/// oracle and the reconstruction are inverse to each other on these.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilRep<S> {
    pub components: Vec<WeilComponent<S>>,
}

impl<S: Scalar> WeilRep<S> {
    /// Checks component rows, stabilizer orders, and eigenvalue lists.
    /// `zero_tol` is the floating-mode threshold below which an eigenvalue
    /// counts as zero.
    pub fn validate(
        &self,
        ctx: &TableCtx<S>,
        shape: &LocalShape,
        zero_tol: f64,
    ) -> Result<(), ModelError> {
        for comp in &self.components {
            if comp.row >= ctx.num_rows() {
                return Err(ModelError::RowRange {
                    row: comp.row,
                    rows: ctx.num_rows(),
                });
            }
            if comp.m == 0 || shape.f() % comp.m != 0 {
                return Err(ModelError::BadStabilizerOrder {
                    row: comp.row,
                    m: comp.m,
                    f: shape.f(),
                });
            }
            if comp.mu.is_empty() {
                return Err(ModelError::EmptySpectrum { row: comp.row });
            }
            if comp.mu.iter().any(|mu| mu.is_zero_within(zero_tol)) {
                return Err(ModelError::ZeroEigenvalue { row: comp.row });
            }
        }
        Ok(())
    }

    pub fn dim(&self, ctx: &TableCtx<S>) -> u64 {
        self.components
            .iter()
            .map(|comp| ctx.degree(comp.row) * comp.mu.len() as u64)
            .sum()
    }

    /// Trace of the representation at the Frobenius of the extension indexed
    /// by the slot: the sum over components of the character value at g times
    /// the r-th power sum of the unramified eigenvalues.
    pub fn trace_at(
        &self,
        ctx: &TableCtx<S>,
        shape: &LocalShape,
        slot: FieldSlot,
    ) -> Result<S, ModelError> {
        shape.check_slot(slot)?;
        let mut total = S::zero();
        for comp in &self.components {
            let mut inner = S::zero();
            for mu in &comp.mu {
                inner = inner.add(&mu.powu(slot.r as u64));
            }
            total = total.add(&ctx.value(comp.row, slot.g).mul(&inner));
        }
        Ok(total)
    }

    /// Evaluates the oracle on a list of slots.
    pub fn dataset(
        &self,
        ctx: &TableCtx<S>,
        shape: &LocalShape,
        slots: &[FieldSlot],
    ) -> Result<TraceDataset<S>, ModelError> {
        let mut data = TraceDataset::new();
        for &slot in slots {
            let value = self.trace_at(ctx, shape, slot)?;
            data.insert(shape, slot, value, EntrySource::Direct)?;
        }
        Ok(data)
    }
}
