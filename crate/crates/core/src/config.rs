//! Run configuration: a plain `key = value` file, every key also settable
//! individually (the command-line flags use the same names).
//!
//! ```text
//! # comments start with '#'
//! n_spins = 4
//! j_coupling = 1.0
//! field_grid = 0.2, 0.6, 1.0, 1.4, 1.8
//! depth = 2
//! parameter_mode = per_gate          # or per_layer
//! order_parameter_variant = exclude_diagonal
//! shots = 4096
//! restarts = 4
//! max_evaluations = 2000
//! seed = 2024
//! p1 = 0.002
//! p2 = 0.02
//! p_readout = 0.03
//! critical_window = 0.8, 1.2
//! threads = 4
//! output_dir = tfim-run
//! reference =                        # optional wide table to compare against
//! import =                           # optional wide table consumed by `report`
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::ansatz::{AnsatzSpec, ParameterMode};
use crate::error::{Error, Result};
use crate::exact::OrderParameterVariant;
use crate::model::SpinChainModel;
use crate::optimizer::NelderMead;
use crate::statevector::NoiseSpec;
use crate::vqe::OptimizerConfig;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TFIM_OUTPUT_DIR";

pub const KEYS: &[&str] = &[
    "n_spins",
    "j_coupling",
    "field_grid",
    "depth",
    "parameter_mode",
    "order_parameter_variant",
    "shots",
    "restarts",
    "max_evaluations",
    "seed",
    "p1",
    "p2",
    "p_readout",
    "critical_window",
    "threads",
    "output_dir",
    "reference",
    "import",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_spins: usize,
    pub j_coupling: f64,
    pub field_grid: Vec<f64>,
    pub depth: usize,
    pub parameter_mode: ParameterMode,
    pub order_parameter_variant: OrderParameterVariant,
    pub shots: usize,
    pub restarts: usize,
    pub max_evaluations: usize,
    pub seed: u64,
    pub noise: NoiseSpec,
    pub critical_window: (f64, f64),
    pub threads: usize,
    pub output_dir: PathBuf,
    pub reference: Option<PathBuf>,
    pub import: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let output_dir = std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("tfim-run"));
        Self {
            n_spins: 4,
            j_coupling: 1.0,
            field_grid: vec![0.2, 0.6, 1.0, 1.4, 1.8],
            depth: 2,
            parameter_mode: ParameterMode::PerGate,
            order_parameter_variant: OrderParameterVariant::ExcludeDiagonal,
            shots: crate::estimator::DEFAULT_SHOTS,
            restarts: 4,
            max_evaluations: 2000,
            seed: 2024,
            noise: NoiseSpec::default(),
            critical_window: crate::metrics::DEFAULT_CRITICAL_WINDOW,
            threads: 4,
            output_dir,
            reference: None,
            import: None,
        }
    }
}

fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| format!("{s:?} is not a number"))
        })
        .collect()
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |why: String| Error::Config(format!("{key}: {why}"));
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse::<T>().map_err(|_| format!("cannot parse {v:?}"))
        }
        match key {
            "n_spins" => self.n_spins = num(value).map_err(bad)?,
            "j_coupling" => self.j_coupling = num(value).map_err(bad)?,
            "field_grid" => self.field_grid = parse_list(value).map_err(bad)?,
            "depth" => self.depth = num(value).map_err(bad)?,
            "parameter_mode" => {
                self.parameter_mode = ParameterMode::parse(value)
                    .ok_or_else(|| bad("expected per_gate or per_layer".into()))?
            }
            "order_parameter_variant" => {
                self.order_parameter_variant = OrderParameterVariant::parse(value)
                    .ok_or_else(|| bad("expected include_diagonal or exclude_diagonal".into()))?
            }
            "shots" => self.shots = num(value).map_err(bad)?,
            "restarts" => self.restarts = num(value).map_err(bad)?,
            "max_evaluations" => self.max_evaluations = num(value).map_err(bad)?,
            "seed" => self.seed = num(value).map_err(bad)?,
            "p1" => self.noise.p1 = num(value).map_err(bad)?,
            "p2" => self.noise.p2 = num(value).map_err(bad)?,
            "p_readout" => self.noise.p_readout = num(value).map_err(bad)?,
            "critical_window" => match parse_list(value).map_err(bad)?.as_slice() {
                [lo, hi] => self.critical_window = (*lo, *hi),
                _ => return Err(bad("expected two values lo, hi".into())),
            },
            "threads" => self.threads = num(value).map_err(bad)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "reference" => self.reference = (!value.is_empty()).then(|| PathBuf::from(value)),
            "import" => self.import = (!value.is_empty()).then(|| PathBuf::from(value)),
            other => {
                return Err(Error::Config(format!(
                    "unknown key {other:?}; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got {raw:?}", n + 1))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingInput(path.to_path_buf()));
        }
        Self::parse_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        SpinChainModel::new(self.n_spins, self.j_coupling, 0.0)?;
        if self.field_grid.is_empty() {
            return Err(Error::Config("field_grid must not be empty".into()));
        }
        if self.field_grid.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(Error::Config(
                "field_grid values must be finite and non-negative".into(),
            ));
        }
        if self.field_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "field_grid must be strictly ascending".into(),
            ));
        }
        if self.j_coupling <= 0.0 {
            return Err(Error::Config("j_coupling must be positive".into()));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.max_evaluations == 0 {
            return Err(Error::Config("max_evaluations must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        let (lo, hi) = self.critical_window;
        if !(lo <= hi) {
            return Err(Error::Config(format!(
                "critical_window [{lo}, {hi}] is inverted"
            )));
        }
        self.noise.validate()
    }

    pub fn template(&self) -> Result<SpinChainModel> {
        SpinChainModel::new(self.n_spins, self.j_coupling, 0.0)
    }

    pub fn ansatz(&self) -> Result<AnsatzSpec> {
        AnsatzSpec::new(self.n_spins, self.depth, self.parameter_mode)
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            simplex: NelderMead {
                max_evaluations: self.max_evaluations,
                ..NelderMead::default()
            },
            restarts: self.restarts,
            ..OptimizerConfig::default()
        }
    }

    /// Canonical `key = value` dump; parsing it yields the same config.
    pub fn to_canonical_string(&self) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        [
            ("n_spins", self.n_spins.to_string()),
            ("j_coupling", self.j_coupling.to_string()),
            ("field_grid", fmt_list(&self.field_grid)),
            ("depth", self.depth.to_string()),
            ("parameter_mode", self.parameter_mode.name().to_string()),
            (
                "order_parameter_variant",
                self.order_parameter_variant.name().to_string(),
            ),
            ("shots", self.shots.to_string()),
            ("restarts", self.restarts.to_string()),
            ("max_evaluations", self.max_evaluations.to_string()),
            ("seed", self.seed.to_string()),
            ("p1", self.noise.p1.to_string()),
            ("p2", self.noise.p2.to_string()),
            ("p_readout", self.noise.p_readout.to_string()),
            (
                "critical_window",
                fmt_list(&[self.critical_window.0, self.critical_window.1]),
            ),
            ("threads", self.threads.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("reference", path(&self.reference)),
            ("import", path(&self.import)),
        ]
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
    }

    /// SHA-256 of the canonical dump, excluding settings that cannot change
    /// any computed value (`threads`, `output_dir`).
    pub fn hash(&self) -> String {
        let text: String = self
            .to_canonical_string()
            .lines()
            .filter(|l| !l.starts_with("threads") && !l.starts_with("output_dir"))
            .map(|l| format!("{l}\n"))
            .collect();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn parse_and_round_trip() {
        let cfg = RunConfig::parse_str(
            "field_grid = 0.0, 0.5 # two points\nparameter_mode = per_layer\nseed=9\n",
        )
        .unwrap();
        assert_eq!(cfg.field_grid, vec![0.0, 0.5]);
        assert_eq!(cfg.parameter_mode, ParameterMode::PerLayer);
        assert_eq!(cfg.seed, 9);
        assert_eq!(
            RunConfig::parse_str(&cfg.to_canonical_string()).unwrap(),
            cfg
        );
    }

    #[test]
    fn validation_failures() {
        let mut cfg = RunConfig::default();
        cfg.field_grid = vec![1.0, 0.5];
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.noise.p2 = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.shots = 0;
        assert!(cfg.validate().is_err());
        assert!(RunConfig::parse_str("nope = 1").is_err());
        assert!(RunConfig::parse_str("critical_window = 0.8").is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output_dir = PathBuf::from("/elsewhere");
        b.threads = 1;
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
