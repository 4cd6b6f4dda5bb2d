//! The staged workflow behind the `tfim` command: exact reference, VQE
//! optimization, sampled execution on the ideal or noisy backend, and the
//! final report. Each stage reads and writes plain-text files in the run
//! directory.
//!
//! Run directory layout:
//!
//! | file | written by | content |
//! |------|------------|---------|
//! | `exact.csv` | exact | exact series + both order-parameter variants + gap |
//! | `exact.log` | exact | variant in use and, with a reference table, which variant matches it |
//! | `params.txt` | vqe | parameter store, one record per field value |
//! | `vqe.csv` | vqe | noiseless observables of the optimized circuits |
//! | `sampled_ideal.csv`, `sampled_noisy.csv` | sample | shot-based rows with error bars |
//! | `shots_ideal.txt`, `shots_noisy.txt` | sample | shot archives |
//! | `sweep.csv`, `metrics.csv`, `fig_*.csv` | report | aligned table, MAE/RMSE, plot data |
//! | `manifest.txt` | report | configuration, hash, seeds, timestamp |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::ansatz::{model_energy, prepare_state};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::estimator::{
    run_batched_job, write_shot_archive, Backend, BackendResult, MeasurementPlan,
};
use crate::exact::{exact_sweep, ExactObservables, OrderParameterVariant};
use crate::metrics::{
    assemble_report, compute_metrics, emit_figure_data, format_metrics_table, format_series_table,
    format_sweep_table, read_sweep_table, Figure, MetricsReport, Series, SeriesKind, SeriesRow,
    SweepReport,
};
use crate::model::PauliTerm;
use crate::vqe::{
    read_parameter_store, vqe_sweep, write_parameter_store, ParameterRecord, VqeResult,
};

pub const EXACT_FILE: &str = "exact.csv";
pub const EXACT_LOG: &str = "exact.log";
pub const PARAMS_FILE: &str = "params.txt";
pub const VQE_FILE: &str = "vqe.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Tolerance used to decide which order-parameter variant matches a reference.
pub const VARIANT_MATCH_TOLERANCE: f64 = 1e-3;

pub fn sampled_file(backend: Backend) -> &'static str {
    match backend {
        Backend::IdealSampled => "sampled_ideal.csv",
        Backend::Noisy => "sampled_noisy.csv",
    }
}

pub fn shots_file(backend: Backend) -> &'static str {
    match backend {
        Backend::IdealSampled => "shots_ideal.txt",
        Backend::Noisy => "shots_noisy.txt",
    }
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn prepare(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(())
}

pub fn exact_series(results: &[ExactObservables]) -> Series {
    Series::new(
        SeriesKind::Exact,
        results
            .iter()
            .map(|o| SeriesRow {
                field: o.field,
                energy: o.energy,
                mz: o.order_parameter,
                x_mean: Some(o.x_mean()),
                zz_mean: Some(o.zz_mean()),
                ..Default::default()
            })
            .collect(),
    )
}

/// Which order-parameter variants agree with a reference column, with the
/// largest deviation of each.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantResolution {
    pub include_max_dev: f64,
    pub exclude_max_dev: f64,
}

impl VariantResolution {
    pub fn matching(&self) -> Vec<OrderParameterVariant> {
        let mut v = Vec::new();
        if self.include_max_dev <= VARIANT_MATCH_TOLERANCE {
            v.push(OrderParameterVariant::IncludeDiagonal);
        }
        if self.exclude_max_dev <= VARIANT_MATCH_TOLERANCE {
            v.push(OrderParameterVariant::ExcludeDiagonal);
        }
        v
    }
}

pub fn resolve_variant(
    results: &[ExactObservables],
    reference: &Series,
) -> Result<VariantResolution> {
    if reference.rows.len() != results.len()
        || reference
            .rows
            .iter()
            .zip(results)
            .any(|(r, o)| (r.field - o.field).abs() > 1e-9)
    {
        return Err(Error::GridMismatch(
            "reference grid differs from the configured grid".into(),
        ));
    }
    let dev = |f: fn(&ExactObservables) -> f64| {
        results
            .iter()
            .zip(&reference.rows)
            .map(|(o, r)| (f(o) - r.mz).abs())
            .fold(0.0, f64::max)
    };
    Ok(VariantResolution {
        include_max_dev: dev(|o| o.order_parameter_include),
        exclude_max_dev: dev(|o| o.order_parameter_exclude),
    })
}

#[derive(Debug, Clone)]
pub struct ExactOutput {
    pub results: Vec<ExactObservables>,
    pub resolution: Option<VariantResolution>,
}

/// Exact reference sweep; writes `exact.csv` and `exact.log`.
pub fn cmd_exact(cfg: &RunConfig) -> Result<ExactOutput> {
    prepare(cfg)?;
    let results = exact_sweep(
        &cfg.template()?,
        &cfg.field_grid,
        cfg.order_parameter_variant,
    )?;
    let series = exact_series(&results);
    let extras = vec![
        (
            "exact_mz_include_diagonal".to_string(),
            results.iter().map(|o| o.order_parameter_include).collect(),
        ),
        (
            "exact_mz_exclude_diagonal".to_string(),
            results.iter().map(|o| o.order_parameter_exclude).collect(),
        ),
        (
            "exact_gap".to_string(),
            results.iter().map(|o| o.degeneracy_gap).collect(),
        ),
    ];
    fs::write(
        out_path(cfg, EXACT_FILE),
        format_series_table(&series, &extras),
    )?;

    let mut log = format!(
        "order_parameter_variant = {}\n",
        cfg.order_parameter_variant.name()
    );
    let mut resolution = None;
    if let Some(path) = &cfg.reference {
        let reference = read_sweep_table(path)?
            .into_iter()
            .find(|s| s.kind == SeriesKind::Exact)
            .ok_or_else(|| Error::MissingSeries(format!("exact series in {}", path.display())))?;
        let r = resolve_variant(&results, &reference)?;
        let matching: Vec<&str> = r.matching().iter().map(|v| v.name()).collect();
        writeln!(log, "reference = {}", path.display()).unwrap();
        writeln!(
            log,
            "include_diagonal max deviation = {:.6}",
            r.include_max_dev
        )
        .unwrap();
        writeln!(
            log,
            "exclude_diagonal max deviation = {:.6}",
            r.exclude_max_dev
        )
        .unwrap();
        writeln!(
            log,
            "matching variant(s) within {VARIANT_MATCH_TOLERANCE}: {}",
            if matching.is_empty() {
                "none".to_string()
            } else {
                matching.join(", ")
            }
        )
        .unwrap();
        log::info!("order-parameter variants matching the reference: {matching:?}");
        resolution = Some(r);
    }
    fs::write(out_path(cfg, EXACT_LOG), log)?;
    Ok(ExactOutput {
        results,
        resolution,
    })
}

/// Noiseless observables of an optimized circuit.
pub fn vqe_row(cfg: &RunConfig, result: &VqeResult) -> Result<SeriesRow> {
    let state = prepare_state(&result.parameters.spec, &result.parameters.values)?;
    let n = cfg.n_spins;
    let z: f64 = (0..n)
        .map(|i| state.expectation(PauliTerm::Z(i)))
        .sum::<Result<f64>>()?
        / n as f64;
    let x: f64 = (0..n)
        .map(|i| state.expectation(PauliTerm::X(i)))
        .sum::<Result<f64>>()?
        / n as f64;
    let zz: f64 = (0..n - 1)
        .map(|i| state.expectation(PauliTerm::ZZ(i, i + 1)))
        .sum::<Result<f64>>()?
        / (n - 1) as f64;
    Ok(SeriesRow {
        field: result.field,
        energy: result.energy,
        mz: z.abs(),
        x_mean: Some(x),
        zz_mean: Some(zz),
        ..Default::default()
    })
}

#[derive(Debug, Clone)]
pub struct VqeOutput {
    pub results: Vec<VqeResult>,
    pub records: Vec<ParameterRecord>,
    pub series: Series,
}

/// VQE sweep; writes `params.txt` and `vqe.csv`.
pub fn cmd_vqe(cfg: &RunConfig) -> Result<VqeOutput> {
    prepare(cfg)?;
    let template = cfg.template()?;
    let spec = cfg.ansatz()?;
    let results = vqe_sweep(
        &spec,
        &template,
        &cfg.field_grid,
        &cfg.optimizer(),
        cfg.seed,
    )?;
    for r in &results {
        let model = template.with_field(r.field)?;
        let baseline = model_energy(&model, &crate::statevector::QuantumState::zero(cfg.n_spins))?;
        if r.energy > baseline + 1e-9 {
            return Err(Error::Numerical(format!(
                "optimizer at h = {} ended at {} above the θ = 0 energy {baseline}",
                r.field, r.energy
            )));
        }
    }
    let records: Vec<ParameterRecord> = results
        .iter()
        .map(|r| ParameterRecord::from_result(r, cfg.seed))
        .collect();
    write_parameter_store(&out_path(cfg, PARAMS_FILE), &records)?;
    let rows = results
        .iter()
        .map(|r| vqe_row(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let series = Series::new(SeriesKind::Vqe, rows);
    let extras = vec![
        (
            "vqe_evaluations".to_string(),
            results.iter().map(|r| r.evaluations as f64).collect(),
        ),
        (
            "vqe_converged".to_string(),
            results
                .iter()
                .map(|r| if r.converged { 1.0 } else { 0.0 })
                .collect(),
        ),
    ];
    fs::write(
        out_path(cfg, VQE_FILE),
        format_series_table(&series, &extras),
    )?;
    Ok(VqeOutput {
        results,
        records,
        series,
    })
}

pub fn backend_series(kind: SeriesKind, results: &[BackendResult]) -> Series {
    Series::new(
        kind,
        results
            .iter()
            .map(|r| SeriesRow {
                field: r.field,
                energy: r.energy,
                energy_err: Some(r.energy_err),
                mz: r.abs_mz,
                mz_err: Some(r.mz_err),
                x_mean: Some(r.x_mean),
                zz_mean: Some(r.zz_mean),
            })
            .collect(),
    )
}

fn series_kind(backend: Backend) -> SeriesKind {
    match backend {
        Backend::IdealSampled => SeriesKind::Sampled,
        Backend::Noisy => SeriesKind::Noisy,
    }
}

#[derive(Debug, Clone)]
pub struct SampleOutput {
    pub results: Vec<BackendResult>,
    pub series: Series,
}

/// Batched shot execution of the stored circuits on one backend.
pub fn cmd_sample(cfg: &RunConfig, backend: Backend) -> Result<SampleOutput> {
    prepare(cfg)?;
    let records = read_parameter_store(&out_path(cfg, PARAMS_FILE))?;
    let plan = MeasurementPlan::for_grid(cfg.n_spins, &cfg.field_grid, &records, cfg.shots)?;
    let output = run_batched_job(
        &plan,
        &cfg.template()?,
        backend,
        Some(&cfg.noise),
        cfg.seed,
        cfg.threads,
    )?;
    let series = backend_series(series_kind(backend), &output.results);
    fs::write(
        out_path(cfg, sampled_file(backend)),
        format_series_table(&series, &[]),
    )?;
    write_shot_archive(&out_path(cfg, shots_file(backend)), &output.executed)?;
    Ok(SampleOutput {
        results: output.results,
        series,
    })
}

fn read_series(path: &Path, kind: SeriesKind) -> Result<Series> {
    read_sweep_table(path)?
        .into_iter()
        .find(|s| s.kind == kind)
        .ok_or_else(|| Error::MissingSeries(format!("{kind} series in {}", path.display())))
}

#[derive(Debug, Clone)]
pub struct ReportOutput {
    pub report: SweepReport,
    pub metrics: Vec<MetricsReport>,
    pub warnings: Vec<String>,
}

/// Loads every available series, either from the run directory or from the
/// `import` table, and writes the sweep table, metrics, figure data and the
/// manifest.
pub fn cmd_report(cfg: &RunConfig) -> Result<ReportOutput> {
    prepare(cfg)?;
    let mut warnings = Vec::new();
    let (exact, vqe, sampled, noisy) = match &cfg.import {
        Some(path) => {
            let mut all = read_sweep_table(path)?;
            let mut take =
                |k: SeriesKind| all.iter().position(|s| s.kind == k).map(|i| all.remove(i));
            let exact = take(SeriesKind::Exact).ok_or_else(|| {
                Error::MissingSeries(format!("exact series in {}", path.display()))
            })?;
            (
                exact,
                take(SeriesKind::Vqe),
                take(SeriesKind::Sampled),
                take(SeriesKind::Noisy),
            )
        }
        None => {
            let exact_path = out_path(cfg, EXACT_FILE);
            if !exact_path.exists() {
                return Err(Error::MissingInput(exact_path));
            }
            let exact = read_series(&exact_path, SeriesKind::Exact)?;
            let optional = |name: &str,
                            kind: SeriesKind,
                            warnings: &mut Vec<String>|
             -> Result<Option<Series>> {
                let p = out_path(cfg, name);
                if p.exists() {
                    read_series(&p, kind).map(Some)
                } else {
                    warnings.push(format!("{} not found; {kind} series omitted", p.display()));
                    Ok(None)
                }
            };
            let vqe = optional(VQE_FILE, SeriesKind::Vqe, &mut warnings)?;
            let sampled = optional(
                sampled_file(Backend::IdealSampled),
                SeriesKind::Sampled,
                &mut warnings,
            )?;
            let noisy = optional(
                sampled_file(Backend::Noisy),
                SeriesKind::Noisy,
                &mut warnings,
            )?;
            (exact, vqe, sampled, noisy)
        }
    };

    let provenance = vec![
        ("seed".to_string(), cfg.seed.to_string()),
        ("depth".to_string(), cfg.depth.to_string()),
        (
            "parameter_mode".to_string(),
            cfg.parameter_mode.name().to_string(),
        ),
        ("shots".to_string(), cfg.shots.to_string()),
        (
            "order_parameter_variant".to_string(),
            cfg.order_parameter_variant.name().to_string(),
        ),
    ];
    let report = assemble_report(exact, vqe, sampled, noisy, provenance)?;

    let exact = &report.series[0];
    let mut metrics = Vec::new();
    for s in report.series.iter().skip(1) {
        let m = compute_metrics(exact, s, cfg.critical_window)?;
        if m.window_points == 0 {
            warnings.push(format!(
                "no grid point inside critical window [{}, {}]; window metrics omitted for {}",
                cfg.critical_window.0, cfg.critical_window.1, s.kind
            ));
        }
        metrics.push(m);
    }
    if let Some(flags) = &report.hierarchy {
        for (h, ok) in report.grid.iter().zip(flags) {
            if !ok {
                warnings.push(format!(
                    "energy ordering exact <= vqe <= noisy violated at h = {h}"
                ));
            }
        }
    }

    fs::write(out_path(cfg, SWEEP_FILE), format_sweep_table(&report))?;
    fs::write(out_path(cfg, METRICS_FILE), format_metrics_table(&metrics))?;
    for fig in Figure::ALL {
        match emit_figure_data(&report, fig) {
            Ok(text) => fs::write(out_path(cfg, &format!("fig_{}.csv", fig.name())), text)?,
            Err(Error::MissingSeries(s)) => {
                warnings.push(format!("figure {} skipped: missing {s}", fig.name()))
            }
            Err(e) => return Err(e),
        }
    }
    fs::write(out_path(cfg, MANIFEST_FILE), manifest(cfg, &report))?;
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ReportOutput {
        report,
        metrics,
        warnings,
    })
}

fn manifest(cfg: &RunConfig, report: &SweepReport) -> String {
    let mut out = String::new();
    writeln!(out, "# tfim run manifest").unwrap();
    writeln!(out, "config_hash = {}", cfg.hash()).unwrap();
    for (k, v) in &report.provenance {
        writeln!(out, "{k} = {v}").unwrap();
    }
    for s in &report.series {
        writeln!(out, "series {} mz = {}", s.kind, s.kind.mz_definition()).unwrap();
    }
    writeln!(out, "[config]").unwrap();
    out.push_str(&cfg.to_canonical_string());
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "[timestamps]").unwrap();
    writeln!(out, "created_unix = {now}").unwrap();
    out
}

/// exact → vqe → sample(ideal) → sample(noisy) → report.
pub fn pipeline(cfg: &RunConfig) -> Result<ReportOutput> {
    cmd_exact(cfg)?;
    cmd_vqe(cfg)?;
    cmd_sample(cfg, Backend::IdealSampled)?;
    cmd_sample(cfg, Backend::Noisy)?;
    cmd_report(cfg)
}
