mod common;

use common::*;
use proptest::prelude::*;
use tfim::metrics::{
    assemble_report, compute_metrics, emit_figure_data, Figure, Series, SeriesKind, SeriesRow,
    DEFAULT_CRITICAL_WINDOW,
};

const TOL: f64 = 5e-4;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

#[test]
fn published_error_table() {
    let exact = reference_series(SeriesKind::Exact);
    let vqe = compute_metrics(
        &exact,
        &reference_series(SeriesKind::Vqe),
        DEFAULT_CRITICAL_WINDOW,
    )
    .unwrap();
    let hw = compute_metrics(
        &exact,
        &reference_series(SeriesKind::Noisy),
        DEFAULT_CRITICAL_WINDOW,
    )
    .unwrap();
    let expected = [
        (vqe.mz.mae, 0.2887, hw.mz.mae, 0.1320),
        (vqe.mz.rmse, 0.3071, hw.mz.rmse, 0.1593),
        (vqe.energy.mae, 0.9255, hw.energy.mae, 1.9983),
        (vqe.energy.rmse, 1.2301, hw.energy.rmse, 2.2101),
        (
            vqe.mz_crit.unwrap().mae,
            0.3166,
            hw.mz_crit.unwrap().mae,
            0.1470,
        ),
        (
            vqe.energy_crit.unwrap().mae,
            0.7043,
            hw.energy_crit.unwrap().mae,
            1.8085,
        ),
    ];
    for (got_v, want_v, got_h, want_h) in expected {
        assert!(close(got_v, want_v), "{got_v} vs {want_v}");
        assert!(close(got_h, want_h), "{got_h} vs {want_h}");
    }
    assert_eq!(vqe.window_points, 1);
}

#[test]
fn empty_window_yields_no_window_metrics() {
    let exact = reference_series(SeriesKind::Exact);
    let m = compute_metrics(&exact, &reference_series(SeriesKind::Vqe), (0.3, 0.4)).unwrap();
    assert_eq!(m.window_points, 0);
    assert!(m.mz_crit.is_none() && m.energy_crit.is_none());
}

#[test]
fn mismatched_grids_are_rejected() {
    let exact = reference_series(SeriesKind::Exact);
    let mut vqe = reference_series(SeriesKind::Vqe);
    vqe.rows.pop();
    assert!(compute_metrics(&exact, &vqe, DEFAULT_CRITICAL_WINDOW).is_err());
}

fn series(kind: SeriesKind, e: &[f64], m: &[f64]) -> Series {
    let rows = e
        .iter()
        .zip(m)
        .enumerate()
        .map(|(k, (&energy, &mz))| SeriesRow {
            field: 0.1 * k as f64,
            energy,
            mz,
            ..SeriesRow::default()
        })
        .collect();
    Series::new(kind, rows)
}

proptest! {
    #[test]
    fn rmse_bounds_mae(pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..20)) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let m = compute_metrics(&series(SeriesKind::Exact, &a, &a), &series(SeriesKind::Vqe, &b, &b), (0.0, 10.0)).unwrap();
        prop_assert!(m.energy.rmse + 1e-12 >= m.energy.mae);
        prop_assert!(m.mz.rmse + 1e-12 >= m.mz.mae);
        prop_assert_eq!(m.energy.mae == 0.0, a == b);
        prop_assert_eq!(m.energy.rmse == 0.0, a == b);
    }

    #[test]
    fn identical_series_have_zero_error(v in prop::collection::vec(-5.0f64..5.0, 1..20)) {
        let m = compute_metrics(&series(SeriesKind::Exact, &v, &v), &series(SeriesKind::Noisy, &v, &v), (0.0, 10.0)).unwrap();
        prop_assert_eq!(m.mz.mae, 0.0);
        prop_assert_eq!(m.energy.rmse, 0.0);
    }
}

#[test]
fn hardware_correlation_figure_from_fixture() {
    let report = assemble_report(
        reference_series(SeriesKind::Exact),
        Some(reference_series(SeriesKind::Vqe)),
        None,
        Some(reference_series(SeriesKind::Noisy)),
        vec![],
    )
    .unwrap();
    let text = emit_figure_data(&report, Figure::HwZz).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 6);
    for (k, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[0].parse::<f64>().unwrap(), GRID[k]);
        assert!(
            cols.iter().any(|c| c.parse::<f64>().ok() == Some(HW_ZZ[k])),
            "{line}"
        );
    }
    assert_eq!(report.hierarchy, Some(vec![true; 5]));
    assert!(emit_figure_data(&report, Figure::HwMz).is_ok());
}

#[test]
fn figures_need_their_series() {
    let report = assemble_report(
        reference_series(SeriesKind::Exact),
        None,
        None,
        None,
        vec![],
    )
    .unwrap();
    assert!(emit_figure_data(&report, Figure::EnergyCompare).is_err());
    assert!(report.hierarchy.is_none());
}
