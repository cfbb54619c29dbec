//! Reconstruction of semisimple representations of local Weil groups from
//! Frobenius trace data over finite extensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`cyclo`] — exact arithmetic in cyclotomic fields `Q(zeta_n)`, plus an
//!   exact root finder for polynomials that split over such a field.
//! * [`groups`] — finite groups given by multiplication tables, conjugacy
//!   classes, and character tables (computed modularly, or ingested).
//! * [`weilmodel`] — the finite model of a Weil representation: a group with
//!   inertia subgroup and Frobenius, unramified spectra attached to twist
//!   orbits, and trace datasets keyed by field slots.
//! * [`reconstruct`] — twist orbits, power sums of unramified parts, and the
//!   recovery of eigenvalue multisets from traces.
//! * [`wdrep`] — numeric Weil–Deligne utilities (weight-monodromy checks).
//! * [`curves`] — hyperelliptic point counts over small finite fields and the
//!   conversion between counts and traces.

pub mod arith;
pub mod curves;
pub mod cyclo;
pub mod groups;
pub mod reconstruct;
pub mod wdrep;
pub mod weilmodel;

pub use cyclo::CycloNum;
pub use groups::{CharTable, ClassData, GroupData};
pub use reconstruct::{CanonicalRep, Reconstruction, TwistOrbit};
pub use weilmodel::{FieldSlot, LocalShape, Scalar, TableCtx, TraceDataset, WeilRep};
