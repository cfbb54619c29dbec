//! Shared helpers for the integration tests: fixture locations and the
//! builders whose output the checked-in fixture files must match.
#![allow(dead_code)]

use std::path::PathBuf;

use weiltrace::cyclo::CycloNum;
use weiltrace::groups::{samples, CharTable, GroupData};
use weiltrace::reconstruct::{reconstruct_exact, ReconstructConfig, Reconstruction};
use weiltrace::weilmodel::{dataset_from_counts, CountData, CountEntry, LocalShape, TraceDataset};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

pub fn group_c7c3() -> GroupData {
    samples::c7c3()
}

/// The character table of the order-21 group in its published layout:
/// classes listed as (1, sigma, sigma^2, tau, tau^3) and rows as the
/// trivial character, the two cubic characters of the quotient, and the
/// two three-dimensional characters. The computed table orders classes by
/// smallest representative, so this doubles as a permuted-ingestion case.
pub fn chartab_c7c3_published() -> CharTable {
    let group = group_c7c3();
    let computed = CharTable::compute(&group).expect("sample table computes");
    let col_of = |rep: usize| {
        computed
            .classes
            .iter()
            .position(|c| c.rep == rep)
            .expect("class rep present")
    };
    let cols: Vec<usize> = [0, 7, 14, 1, 3].iter().map(|&rep| col_of(rep)).collect();

    let one = CycloNum::one();
    let zeta3 = CycloNum::root_of_unity(3, 1);
    let rho_val = CycloNum::from_int(-1)
        .add(&CycloNum::gauss_sum(7).expect("7 is prime"))
        .div_int(2);
    let row_where = |col: usize, value: &CycloNum| {
        computed
            .rows
            .iter()
            .position(|row| row[col] == *value)
            .expect("row present")
    };
    let triv = computed
        .rows
        .iter()
        .position(|row| row.iter().all(|v| *v == one))
        .expect("trivial row present");
    let chi = row_where(col_of(7), &zeta3);
    let chi_bar = row_where(col_of(7), &zeta3.conj());
    let rho1 = row_where(col_of(1), &rho_val);
    let rho2 = row_where(col_of(1), &rho_val.conj());

    CharTable {
        classes: cols.iter().map(|&c| computed.classes[c]).collect(),
        rows: [triv, chi, chi_bar, rho1, rho2]
            .iter()
            .map(|&i| cols.iter().map(|&c| computed.rows[i][c].clone()).collect())
            .collect(),
    }
}

fn curve_counts(swap: bool) -> CountData {
    let mut entries = Vec::new();
    for r in 1..=6usize {
        for k in 0..7usize {
            let g = [0, 7, 14][r % 3] + k;
            let count = match (r, g, swap) {
                (3, 0, _) => 344,
                (3, 1 | 2 | 4, false) | (3, 3 | 5 | 6, true) => 295,
                (3, _, _) => 393,
                (6, 0, _) => 119_708,
                (6, _, _) => 117_307,
                _ => 7u64.pow(r as u32) + 1,
            };
            entries.push(CountEntry { g, r, count });
        }
    }
    CountData { genus: 3, entries }
}

/// Point counts of the first genus-3 curve over the extensions indexed by
/// residue degree r <= 6 and the Frobenius-coset element g.
pub fn counts_x() -> CountData {
    curve_counts(false)
}

/// Point counts of its quadratic twist: the two nontrivial inertia classes
/// trade their counts at r = 3.
pub fn counts_xprime() -> CountData {
    curve_counts(true)
}

pub fn c7c3_shape() -> (LocalShape, CharTable) {
    let group = group_c7c3();
    let table = CharTable::compute(&group).expect("sample table computes");
    let shape = LocalShape::new(group, 7).expect("valid shape");
    (shape, table)
}

pub fn dataset_for(counts: &CountData, shape: &LocalShape) -> TraceDataset<CycloNum> {
    let (data, warnings) =
        dataset_from_counts::<CycloNum>(shape, counts.genus, &counts.entries).expect("valid slots");
    assert!(warnings.is_empty(), "counts violate the smooth-curve bound");
    data
}

/// The dimension-six reconstruction from the first curve's counts, frozen
/// as the expected-output fixture.
pub fn expected_x() -> Reconstruction<CycloNum> {
    let (shape, table) = c7c3_shape();
    let data = dataset_for(&counts_x(), &shape);
    reconstruct_exact(&data, &table, &shape, 6, &ReconstructConfig::default())
        .expect("reconstruction succeeds")
}

/// Every fixture file as (name, content); the guard test and the ignored
/// writer both consume this list.
pub fn fixture_values() -> Vec<(&'static str, serde_json::Value)> {
    fn to(v: impl serde::Serialize) -> serde_json::Value {
        serde_json::to_value(v).expect("serializable")
    }
    vec![
        ("group_c7c3.json", to(group_c7c3())),
        ("chartab_c7c3.json", to(chartab_c7c3_published())),
        ("counts_x.json", to(counts_x())),
        ("counts_xprime.json", to(counts_xprime())),
        ("expected_x.json", to(expected_x())),
    ]
}
