//! MAE/RMSE of the variational and hardware series against the exact series
//! of a wide table, by default the published reference values bundled with
//! the tests.
//!
//! ```text
//! cargo run --example error_metrics [table.csv]
//! ```

use std::path::PathBuf;

use tfim::metrics::{
    compute_metrics, format_metrics_table, read_sweep_table, SeriesKind, DEFAULT_CRITICAL_WINDOW,
};

fn main() -> tfim::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference_table.csv")
        });
    let series = read_sweep_table(&path)?;
    let exact = series
        .iter()
        .find(|s| s.kind == SeriesKind::Exact)
        .ok_or_else(|| tfim::Error::MissingSeries("exact".into()))?;
    let metrics = series
        .iter()
        .filter(|s| s.kind != SeriesKind::Exact)
        .map(|s| compute_metrics(exact, s, DEFAULT_CRITICAL_WINDOW))
        .collect::<tfim::Result<Vec<_>>>()?;
    print!("{}", format_metrics_table(&metrics));
    Ok(())
}
