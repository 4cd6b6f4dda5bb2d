//! Variational minimization of the chain energy over the layered ansatz,
//! field sweeps with warm starts, and the plain-text parameter store.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;

use crate::ansatz::{energy_of, AnsatzParameters, AnsatzSpec, ParameterMode};
use crate::error::{Error, Result};
use crate::model::SpinChainModel;
use crate::optimizer::{Minimizer, NelderMead};
use crate::statevector::rng_stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub simplex: NelderMead,
    /// Independent starts; the first sits exactly at θ = 0.
    pub restarts: usize,
    /// Half-width of the uniform perturbation around zero for later starts.
    pub init_spread: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            simplex: NelderMead::default(),
            restarts: 4,
            init_spread: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub field: f64,
    pub energy: f64,
    pub parameters: AnsatzParameters,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    /// Best-so-far energy per iteration of the winning start.
    pub best_history: Vec<f64>,
}

/// Multi-start downhill-simplex minimization of `E(θ)`.
///
/// Starts: θ = 0, then `restarts − 1` uniform draws in `[−init_spread,
/// init_spread]`, plus `warm_start` if given. The best start wins; ties go to
/// the earlier start.
pub fn optimize(
    spec: &AnsatzSpec,
    model: &SpinChainModel,
    config: &OptimizerConfig,
    warm_start: Option<&AnsatzParameters>,
    seed: u64,
) -> Result<VqeResult> {
    if spec.n_spins != model.n_spins() {
        return Err(Error::Dimension {
            expected: model.n_spins(),
            got: spec.n_spins,
        });
    }
    if config.restarts == 0 {
        return Err(Error::Config("restarts must be at least 1".into()));
    }
    let dim = spec.parameter_count();
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for r in 1..config.restarts {
        let mut rng = rng_stream(seed, r as u64);
        starts.push(
            (0..dim)
                .map(|_| rng.gen_range(-config.init_spread..=config.init_spread))
                .collect(),
        );
    }
    if let Some(warm) = warm_start {
        if warm.spec != *spec {
            return Err(Error::ParameterLength {
                expected: dim,
                got: warm.values.len(),
            });
        }
        starts.push(warm.values.clone());
    }

    let mut failure = None;
    let mut best: Option<crate::optimizer::Minimum> = None;
    let mut iterations = 0;
    let mut evaluations = 0;
    for start in &starts {
        let mut objective = |theta: &[f64]| match energy_of(theta, spec, model) {
            Ok(e) => e,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        };
        let m = config.simplex.minimize(&mut objective, start);
        iterations += m.iterations;
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let best = best.expect("at least one start");
    Ok(VqeResult {
        field: model.field(),
        energy: best.value,
        parameters: AnsatzParameters::new(*spec, best.point)?,
        iterations,
        evaluations,
        converged: best.converged,
        restarts_used: starts.len(),
        best_history: best.best_history,
    })
}

/// Optimizes at each field value in the order given, warm-starting every
/// point from the previous optimum. Results follow the grid order.
pub fn vqe_sweep(
    spec: &AnsatzSpec,
    template: &SpinChainModel,
    field_grid: &[f64],
    config: &OptimizerConfig,
    seed: u64,
) -> Result<Vec<VqeResult>> {
    if field_grid.is_empty() {
        return Err(Error::Config("field grid is empty".into()));
    }
    let mut results: Vec<VqeResult> = Vec::with_capacity(field_grid.len());
    for &h in field_grid {
        let model = template.with_field(h)?;
        let warm = results.last().map(|r| &r.parameters);
        let result = optimize(spec, &model, config, warm, seed)?;
        log::debug!(
            "h = {h}: E = {:.6} after {} evaluations",
            result.energy,
            result.evaluations
        );
        results.push(result);
    }
    Ok(results)
}

/// One stored optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRecord {
    pub field: f64,
    pub depth: usize,
    pub mode: ParameterMode,
    pub seed: u64,
    pub energy: f64,
    pub theta: Vec<f64>,
}

impl ParameterRecord {
    pub fn from_result(result: &VqeResult, seed: u64) -> Self {
        Self {
            field: result.field,
            depth: result.parameters.spec.depth,
            mode: result.parameters.spec.mode,
            seed,
            energy: result.energy,
            theta: result.parameters.values.clone(),
        }
    }

    pub fn to_line(&self) -> String {
        let theta: Vec<String> = self.theta.iter().map(|t| t.to_string()).collect();
        format!(
            "h={} depth={} mode={} seed={} energy={} theta={}",
            self.field,
            self.depth,
            self.mode,
            self.seed,
            self.energy,
            theta.join(",")
        )
    }

    pub fn parse_line(line: &str) -> std::result::Result<Self, String> {
        let mut field = None;
        let mut depth = None;
        let mut mode = None;
        let mut seed = None;
        let mut energy = None;
        let mut theta = None;
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| format!("token {token:?} is not key=value"))?;
            let bad = |_| format!("bad value for {key}: {value:?}");
            match key {
                "h" => field = Some(value.parse::<f64>().map_err(bad)?),
                "depth" => {
                    depth = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| format!("bad depth {value:?}"))?,
                    )
                }
                "mode" => {
                    mode = Some(
                        ParameterMode::parse(value).ok_or_else(|| format!("bad mode {value:?}"))?,
                    )
                }
                "seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| format!("bad seed {value:?}"))?,
                    )
                }
                "energy" => energy = Some(value.parse::<f64>().map_err(bad)?),
                "theta" => {
                    theta = Some(
                        value
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(|s| s.parse::<f64>().map_err(|_| format!("bad angle {s:?}")))
                            .collect::<std::result::Result<Vec<_>, _>>()?,
                    )
                }
                other => return Err(format!("unknown key {other:?}")),
            }
        }
        let missing = |k: &str| format!("missing field {k}");
        Ok(Self {
            field: field.ok_or_else(|| missing("h"))?,
            depth: depth.ok_or_else(|| missing("depth"))?,
            mode: mode.ok_or_else(|| missing("mode"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            energy: energy.ok_or_else(|| missing("energy"))?,
            theta: theta.ok_or_else(|| missing("theta"))?,
        })
    }

    pub fn parameters(&self, n_spins: usize) -> Result<AnsatzParameters> {
        AnsatzParameters::new(
            AnsatzSpec::new(n_spins, self.depth, self.mode)?,
            self.theta.clone(),
        )
    }
}

pub const PARAMETER_STORE_HEADER: &str =
    "# tfim parameter store: h depth mode seed energy theta(comma-separated, radians)";

pub fn write_parameter_store(path: &Path, records: &[ParameterRecord]) -> Result<()> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "{PARAMETER_STORE_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

pub fn read_parameter_store(path: &Path) -> Result<Vec<ParameterRecord>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            ParameterRecord::parse_line(l).map_err(|msg| Error::Parse {
                path: path.display().to_string(),
                msg: format!("line {}: {msg}", n + 1),
            })
        })
        .collect()
}
