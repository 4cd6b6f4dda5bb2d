use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tfim::config::RunConfig;
use tfim::estimator::Backend;
use tfim::pipeline;

/// Transverse-field Ising chain: exact, VQE and sampled sweeps.
#[derive(Parser)]
#[command(name = "tfim", version)]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override any configuration key, e.g. `--set shots=100000`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(flatten)]
    keys: KeyFlags,
    #[command(subcommand)]
    command: Command,
}

/// One flag per configuration key, same names as in the file.
#[derive(clap::Args)]
struct KeyFlags {
    #[arg(long = "n_spins", global = true)]
    n_spins: Option<String>,
    #[arg(long = "j_coupling", global = true)]
    j_coupling: Option<String>,
    #[arg(long = "field_grid", global = true)]
    field_grid: Option<String>,
    #[arg(long = "depth", global = true)]
    depth: Option<String>,
    #[arg(long = "parameter_mode", global = true)]
    parameter_mode: Option<String>,
    #[arg(long = "order_parameter_variant", global = true)]
    order_parameter_variant: Option<String>,
    #[arg(long = "shots", global = true)]
    shots: Option<String>,
    #[arg(long = "restarts", global = true)]
    restarts: Option<String>,
    #[arg(long = "max_evaluations", global = true)]
    max_evaluations: Option<String>,
    #[arg(long = "seed", global = true)]
    seed: Option<String>,
    #[arg(long = "p1", global = true)]
    p1: Option<String>,
    #[arg(long = "p2", global = true)]
    p2: Option<String>,
    #[arg(long = "p_readout", global = true)]
    p_readout: Option<String>,
    #[arg(long = "critical_window", global = true)]
    critical_window: Option<String>,
    #[arg(long = "threads", global = true)]
    threads: Option<String>,
    #[arg(long = "output_dir", global = true)]
    output_dir: Option<String>,
    #[arg(long = "reference", global = true)]
    reference: Option<String>,
    #[arg(long = "import", global = true)]
    import: Option<String>,
}

impl KeyFlags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("n_spins", &self.n_spins),
            ("j_coupling", &self.j_coupling),
            ("field_grid", &self.field_grid),
            ("depth", &self.depth),
            ("parameter_mode", &self.parameter_mode),
            ("order_parameter_variant", &self.order_parameter_variant),
            ("shots", &self.shots),
            ("restarts", &self.restarts),
            ("max_evaluations", &self.max_evaluations),
            ("seed", &self.seed),
            ("p1", &self.p1),
            ("p2", &self.p2),
            ("p_readout", &self.p_readout),
            ("critical_window", &self.critical_window),
            ("threads", &self.threads),
            ("output_dir", &self.output_dir),
            ("reference", &self.reference),
            ("import", &self.import),
        ]
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact diagonalization sweep.
    Exact,
    /// VQE sweep; stores optimal parameters.
    Vqe,
    /// Batched shot execution of the stored circuits.
    Sample {
        #[arg(long, default_value = "ideal_sampled")]
        backend: String,
    },
    /// Sweep table, error metrics, figure data and manifest.
    Report,
    /// exact, vqe, sample (ideal and noisy), report.
    Pipeline,
}

fn load_config(cli: &Cli) -> tfim::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for (key, value) in cli.keys.pairs() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    for kv in &cli.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| tfim::Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> tfim::Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Exact => {
            let out = pipeline::cmd_exact(&cfg)?;
            for o in &out.results {
                println!(
                    "h = {:.4}  E0 = {:.4}  M_z = {:.4}",
                    o.field, o.energy, o.order_parameter
                );
            }
        }
        Command::Vqe => {
            let out = pipeline::cmd_vqe(&cfg)?;
            for (r, row) in out.results.iter().zip(&out.series.rows) {
                println!(
                    "h = {:.4}  E = {:.4}  |M_z| = {:.4}  converged = {}",
                    r.field, r.energy, row.mz, r.converged
                );
            }
        }
        Command::Sample { backend } => {
            let backend = Backend::parse(backend).ok_or_else(|| {
                tfim::Error::Config(format!(
                    "unknown backend {backend:?}; use ideal_sampled or noisy"
                ))
            })?;
            let out = pipeline::cmd_sample(&cfg, backend)?;
            for r in &out.results {
                println!(
                    "h = {:.4}  E = {:.4} ± {:.4}  |M_z| = {:.4} ± {:.4}",
                    r.field, r.energy, r.energy_err, r.abs_mz, r.mz_err
                );
            }
        }
        Command::Report | Command::Pipeline => {
            let out = if matches!(cli.command, Command::Report) {
                pipeline::cmd_report(&cfg)?
            } else {
                pipeline::pipeline(&cfg)?
            };
            print!("{}", tfim::metrics::format_metrics_table(&out.metrics));
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    println!("output written to {}", cfg.output_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
