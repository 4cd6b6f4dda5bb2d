#![allow(dead_code)]

use std::path::PathBuf;

use tfim::metrics::{read_sweep_table, Series, SeriesKind};

pub const GRID: [f64; 5] = [0.2, 0.6, 1.0, 1.4, 1.8];
pub const EXACT_ENERGY: [f64; 5] = [-3.0617, -3.6314, -4.7588, -6.1403, -7.6191];
pub const EXACT_MZ: [f64; 5] = [0.8541, 0.7259, 0.5510, 0.4410, 0.3741];
pub const VQE_ENERGY: [f64; 5] = [-3.0311, -3.4444, -4.0544, -4.5779, -5.4759];
pub const VQE_MZ: [f64; 5] = [0.9926, 0.9272, 0.8676, 0.8037, 0.7986];
pub const HW_ENERGY: [f64; 5] = [-2.0963, -2.4436, -2.9503, -3.6870, -4.0428];
pub const HW_MZ: [f64; 5] = [0.8106, 0.7413, 0.6980, 0.6593, 0.6098];
pub const HW_X: [f64; 5] = [0.0472, 0.2756, 0.3378, 0.3684, 0.3806];
pub const HW_ZZ: [f64; 5] = [0.6862, 0.5941, 0.5330, 0.5413, 0.4341];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn reference_series(kind: SeriesKind) -> Series {
    read_sweep_table(&fixture("reference_table.csv"))
        .unwrap()
        .into_iter()
        .find(|s| s.kind == kind)
        .unwrap()
}
