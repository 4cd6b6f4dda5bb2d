//! Aligned per-field tables for every backend, MAE/RMSE against the exact
//! reference, the energy-ordering check, and figure data.
//!
//! Order-parameter columns are not defined identically: the exact series uses
//! the correlation form `sqrt(Σ_{i≠j}⟨Z_iZ_j⟩/N²)`, every other series uses
//! the absolute magnetization `|Σ⟨Z_i⟩/N|`.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Grid values closer than this are treated as the same field.
const GRID_EPS: f64 = 1e-9;

pub const DEFAULT_CRITICAL_WINDOW: (f64, f64) = (0.8, 1.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeriesKind {
    Exact,
    Vqe,
    Sampled,
    Noisy,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 4] = [
        SeriesKind::Exact,
        SeriesKind::Vqe,
        SeriesKind::Sampled,
        SeriesKind::Noisy,
    ];

    pub fn prefix(&self) -> &'static str {
        match self {
            SeriesKind::Exact => "exact",
            SeriesKind::Vqe => "vqe",
            SeriesKind::Sampled => "sampled",
            SeriesKind::Noisy => "noisy",
        }
    }

    pub fn mz_definition(&self) -> &'static str {
        match self {
            SeriesKind::Exact => "correlation order parameter",
            _ => "absolute magnetization",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeriesRow {
    pub field: f64,
    pub energy: f64,
    pub energy_err: Option<f64>,
    pub mz: f64,
    pub mz_err: Option<f64>,
    pub x_mean: Option<f64>,
    pub zz_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub kind: SeriesKind,
    pub rows: Vec<SeriesRow>,
}

impl Series {
    pub fn new(kind: SeriesKind, rows: Vec<SeriesRow>) -> Self {
        Self { kind, rows }
    }

    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.field).collect()
    }
}

fn same_grid(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < GRID_EPS)
}

/// Mean absolute and root-mean-square deviation, or `None` for no points.
fn mae_rmse(diffs: &[f64]) -> Option<(f64, f64)> {
    if diffs.is_empty() {
        return None;
    }
    let n = diffs.len() as f64;
    let mae = diffs.iter().map(|d| d.abs()).sum::<f64>() / n;
    let rmse = (diffs.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
    Some((mae, rmse))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    pub mae: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub backend: SeriesKind,
    pub n_points: usize,
    pub mz: ErrorPair,
    pub energy: ErrorPair,
    pub window: (f64, f64),
    pub window_points: usize,
    /// `None` when no grid point falls inside the window.
    pub mz_crit: Option<ErrorPair>,
    pub energy_crit: Option<ErrorPair>,
}

/// MAE/RMSE of `candidate` against `reference` over the full grid and over
/// grid points with `lo ≤ h ≤ hi`.
pub fn compute_metrics(
    reference: &Series,
    candidate: &Series,
    window: (f64, f64),
) -> Result<MetricsReport> {
    if !same_grid(&reference.grid(), &candidate.grid()) {
        return Err(Error::GridMismatch(format!(
            "{} and {} grids differ",
            reference.kind, candidate.kind
        )));
    }
    if reference.rows.is_empty() {
        return Err(Error::GridMismatch("empty series".into()));
    }
    let (lo, hi) = window;
    let pairs: Vec<(&SeriesRow, &SeriesRow)> = reference.rows.iter().zip(&candidate.rows).collect();
    let diffs = |sel: &dyn Fn(&SeriesRow) -> f64, in_window: bool| -> Vec<f64> {
        pairs
            .iter()
            .filter(|(r, _)| !in_window || (r.field >= lo - GRID_EPS && r.field <= hi + GRID_EPS))
            .map(|(r, c)| sel(c) - sel(r))
            .collect()
    };
    let pair = |v: Option<(f64, f64)>| v.map(|(mae, rmse)| ErrorPair { mae, rmse });
    let mz_all = diffs(&|r| r.mz, false);
    let e_all = diffs(&|r| r.energy, false);
    let mz_win = diffs(&|r| r.mz, true);
    let e_win = diffs(&|r| r.energy, true);
    Ok(MetricsReport {
        backend: candidate.kind,
        n_points: mz_all.len(),
        mz: pair(mae_rmse(&mz_all)).expect("non-empty"),
        energy: pair(mae_rmse(&e_all)).expect("non-empty"),
        window,
        window_points: mz_win.len(),
        mz_crit: pair(mae_rmse(&mz_win)),
        energy_crit: pair(mae_rmse(&e_win)),
    })
}

/// Run settings carried alongside the tables.
pub type Provenance = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub grid: Vec<f64>,
    pub series: Vec<Series>,
    /// Per grid point: `E_exact ≤ E_vqe ≤ E_noisy (+3σ)`, when both are present.
    pub hierarchy: Option<Vec<bool>>,
    pub provenance: Provenance,
}

impl SweepReport {
    pub fn get(&self, kind: SeriesKind) -> Option<&Series> {
        self.series.iter().find(|s| s.kind == kind)
    }

    fn require(&self, kind: SeriesKind) -> Result<&Series> {
        self.get(kind)
            .ok_or_else(|| Error::MissingSeries(kind.prefix().into()))
    }
}

/// `E_exact ≤ E_vqe ≤ E_hardware`, with the upper comparison allowed three
/// standard errors of the hardware energy where one is known.
pub fn energy_hierarchy(exact: &SeriesRow, vqe: &SeriesRow, hardware: &SeriesRow) -> bool {
    let slack = 3.0 * hardware.energy_err.unwrap_or(0.0);
    exact.energy <= vqe.energy + 1e-9 && vqe.energy <= hardware.energy + slack
}

/// Aligns the available series on the exact grid and runs the energy
/// ordering check.
pub fn assemble_report(
    exact: Series,
    vqe: Option<Series>,
    sampled: Option<Series>,
    noisy: Option<Series>,
    provenance: Provenance,
) -> Result<SweepReport> {
    let grid = exact.grid();
    let mut series = vec![exact];
    for s in [vqe, sampled, noisy].into_iter().flatten() {
        if !same_grid(&grid, &s.grid()) {
            return Err(Error::GridMismatch(format!(
                "{} grid differs from the exact grid",
                s.kind
            )));
        }
        series.push(s);
    }
    let mut report = SweepReport {
        grid,
        series,
        hierarchy: None,
        provenance,
    };
    if let (Some(v), Some(n)) = (report.get(SeriesKind::Vqe), report.get(SeriesKind::Noisy)) {
        let e = &report.series[0];
        report.hierarchy = Some(
            (0..report.grid.len())
                .map(|k| energy_hierarchy(&e.rows[k], &v.rows[k], &n.rows[k]))
                .collect(),
        );
    }
    Ok(report)
}

pub(crate) fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn opt4(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    EnergyCompare,
    OrderCompare,
    HwMz,
    HwEnergy,
    HwZz,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::EnergyCompare,
        Figure::OrderCompare,
        Figure::HwMz,
        Figure::HwEnergy,
        Figure::HwZz,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::EnergyCompare => "energy_compare",
            Figure::OrderCompare => "order_compare",
            Figure::HwMz => "hw_mz",
            Figure::HwEnergy => "hw_energy",
            Figure::HwZz => "hw_zz",
        }
    }
}

/// Comma-separated plot data with a header row; values at 4 decimals.
pub fn emit_figure_data(report: &SweepReport, which: Figure) -> Result<String> {
    let mut header: Vec<String> = vec!["h_over_j".into()];
    let mut columns: Vec<Vec<String>> = Vec::new();
    let mut add = |name: String, values: Vec<String>| {
        header.push(name);
        columns.push(values);
    };
    match which {
        Figure::EnergyCompare | Figure::OrderCompare => {
            let energy = which == Figure::EnergyCompare;
            for kind in [SeriesKind::Exact, SeriesKind::Vqe, SeriesKind::Noisy] {
                let s = report.require(kind)?;
                let (val, err) = if energy {
                    ("energy", "energy_err")
                } else {
                    ("mz", "mz_err")
                };
                add(
                    format!("{kind}_{val}"),
                    s.rows
                        .iter()
                        .map(|r| fmt4(if energy { r.energy } else { r.mz }))
                        .collect(),
                );
                if kind != SeriesKind::Exact {
                    add(
                        format!("{kind}_{err}"),
                        s.rows
                            .iter()
                            .map(|r| opt4(if energy { r.energy_err } else { r.mz_err }))
                            .collect(),
                    );
                }
            }
        }
        Figure::HwMz => {
            let s = report.require(SeriesKind::Noisy)?;
            add("abs_mz".into(), s.rows.iter().map(|r| fmt4(r.mz)).collect());
            add(
                "mz_err".into(),
                s.rows.iter().map(|r| opt4(r.mz_err)).collect(),
            );
        }
        Figure::HwEnergy => {
            let s = report.require(SeriesKind::Noisy)?;
            add(
                "energy".into(),
                s.rows.iter().map(|r| fmt4(r.energy)).collect(),
            );
            add(
                "energy_err".into(),
                s.rows.iter().map(|r| opt4(r.energy_err)).collect(),
            );
        }
        Figure::HwZz => {
            let s = report.require(SeriesKind::Noisy)?;
            if s.rows.iter().any(|r| r.zz_mean.is_none()) {
                return Err(Error::MissingSeries("noisy_zz".into()));
            }
            add(
                "zz_mean".into(),
                s.rows.iter().map(|r| opt4(r.zz_mean)).collect(),
            );
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for (k, h) in report.grid.iter().enumerate() {
        let mut line = vec![fmt4(*h)];
        line.extend(columns.iter().map(|c| c[k].clone()));
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

const ROW_FIELDS: [&str; 6] = ["energy", "energy_err", "mz", "mz_err", "x", "zz"];

/// Wide sweep table: `h_over_j`, then `<series>_<field>` for every present
/// series, then `hierarchy_ok` when the check ran. Values at 4 decimals.
pub fn format_sweep_table(report: &SweepReport) -> String {
    let series: Vec<&Series> = report.series.iter().collect();
    format_table(
        &report.grid,
        &series,
        report.hierarchy.as_deref(),
        &[],
        fmt4,
    )
}

/// Stage output for one series at full (round-trip) precision, with optional
/// extra named columns.
pub fn format_series_table(series: &Series, extras: &[(String, Vec<f64>)]) -> String {
    format_table(&series.grid(), &[series], None, extras, |v| v.to_string())
}

fn format_table(
    grid: &[f64],
    series: &[&Series],
    hierarchy: Option<&[bool]>,
    extras: &[(String, Vec<f64>)],
    fmt: fn(f64) -> String,
) -> String {
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["h_over_j".to_string()];
    for s in series {
        header.extend(ROW_FIELDS.iter().map(|f| format!("{}_{f}", s.kind)));
    }
    header.extend(extras.iter().map(|(name, _)| name.clone()));
    if hierarchy.is_some() {
        header.push("hierarchy_ok".into());
    }
    wtr.write_record(&header).expect("in-memory write");
    for (k, h) in grid.iter().enumerate() {
        let mut rec = vec![fmt(*h)];
        for s in series {
            let r = &s.rows[k];
            rec.extend([
                fmt(r.energy),
                opt(r.energy_err),
                fmt(r.mz),
                opt(r.mz_err),
                opt(r.x_mean),
                opt(r.zz_mean),
            ]);
        }
        rec.extend(extras.iter().map(|(_, values)| fmt(values[k])));
        if let Some(flags) = hierarchy {
            rec.push(flags[k].to_string());
        }
        wtr.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("flush")).expect("utf8")
}

/// Reads any wide table with an `h_over_j` column and `<series>_energy` /
/// `<series>_mz` pairs; the other per-series columns are optional.
pub fn read_sweep_table(path: &Path) -> Result<Vec<Series>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let perr = |msg: String| Error::Parse {
        path: path.display().to_string(),
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let h_col = col("h_over_j").ok_or_else(|| perr("no h_over_j column".into()))?;
    let records: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
    let num = |rec: &csv::StringRecord, c: usize| -> Result<Option<f64>> {
        match rec.get(c).unwrap_or("") {
            "" => Ok(None),
            s => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| perr(format!("bad number {s:?}"))),
        }
    };
    let mut out = Vec::new();
    for kind in SeriesKind::ALL {
        let p = kind.prefix();
        let (Some(e_col), Some(m_col)) = (col(&format!("{p}_energy")), col(&format!("{p}_mz")))
        else {
            continue;
        };
        let opt_col = |f: &str| col(&format!("{p}_{f}"));
        let mut rows = Vec::new();
        for rec in &records {
            let get_opt = |c: Option<usize>| c.map_or(Ok(None), |c| num(rec, c));
            let field = num(rec, h_col)?.ok_or_else(|| perr("empty h_over_j".into()))?;
            let (Some(energy), Some(mz)) = (num(rec, e_col)?, num(rec, m_col)?) else {
                return Err(perr(format!("row h = {field} lacks {p} energy or mz")));
            };
            rows.push(SeriesRow {
                field,
                energy,
                mz,
                energy_err: get_opt(opt_col("energy_err"))?,
                mz_err: get_opt(opt_col("mz_err"))?,
                x_mean: get_opt(opt_col("x"))?,
                zz_mean: get_opt(opt_col("zz"))?,
            });
        }
        out.push(Series::new(kind, rows));
    }
    Ok(out)
}

pub fn format_metrics_table(metrics: &[MetricsReport]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "backend",
        "n_points",
        "mae_mz",
        "rmse_mz",
        "mae_energy",
        "rmse_energy",
        "window_lo",
        "window_hi",
        "window_points",
        "mae_mz_crit",
        "rmse_mz_crit",
        "mae_energy_crit",
        "rmse_energy_crit",
    ])
    .expect("in-memory write");
    for m in metrics {
        wtr.write_record([
            m.backend.prefix().to_string(),
            m.n_points.to_string(),
            fmt4(m.mz.mae),
            fmt4(m.mz.rmse),
            fmt4(m.energy.mae),
            fmt4(m.energy.rmse),
            fmt4(m.window.0),
            fmt4(m.window.1),
            m.window_points.to_string(),
            opt4(m.mz_crit.map(|p| p.mae)),
            opt4(m.mz_crit.map(|p| p.rmse)),
            opt4(m.energy_crit.map(|p| p.mae)),
            opt4(m.energy_crit.map(|p| p.rmse)),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("flush")).expect("utf8")
}
