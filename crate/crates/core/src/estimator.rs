//! Shot-based estimation: basis-grouped measurement plans executed as one
//! batch, binomial standard errors, and reconstruction of energy and
//! magnetization with independent-term error propagation.
//!
//! Errors are propagated assuming the individual term estimates are
//! independent, even though Z-basis terms share the same shots. The reported
//! magnetization error is that of the signed site average, taken before the
//! absolute value.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PauliTerm, SpinChainModel};
use crate::statevector::{
    bitstring, parse_bitstring, rng_stream, run_circuit, sample, sample_noisy_circuit, Basis,
    GateOp, NoiseSpec, QuantumState, ShotRecord,
};
use crate::vqe::ParameterRecord;

pub const DEFAULT_SHOTS: usize = 4096;

/// Binomial standard error `sqrt((1 − ⟨O⟩²)/N_shots)` of a ±1-valued observable.
pub fn binomial_std_error(mean: f64, n_shots: usize) -> f64 {
    ((1.0 - mean * mean).max(0.0) / n_shots as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationEstimate {
    pub observable: PauliTerm,
    pub mean: f64,
    pub std_error: f64,
    pub n_shots: usize,
}

impl ExpectationEstimate {
    pub fn new(observable: PauliTerm, mean: f64, n_shots: usize) -> Self {
        Self {
            observable,
            mean,
            std_error: binomial_std_error(mean, n_shots),
            n_shots,
        }
    }

    /// An estimate with no statistical error, e.g. from an exact expectation.
    pub fn exact(observable: PauliTerm, mean: f64) -> Self {
        Self {
            observable,
            mean,
            std_error: 0.0,
            n_shots: 0,
        }
    }
}

/// Counts-based estimates of terms diagonal in the record's basis. In an
/// X record, `X_i` is read as `Z_i` of the rotated register.
pub fn expectations_from_shots(
    record: &ShotRecord,
    terms: &[PauliTerm],
) -> Result<Vec<ExpectationEstimate>> {
    let n = record.n_shots();
    if n == 0 {
        return Err(Error::Config("shot record is empty".into()));
    }
    let counts = record.counts();
    terms
        .iter()
        .map(|&term| {
            term.validate(record.n_qubits)?;
            let readout = match (record.basis, term) {
                (Basis::Z, PauliTerm::Z(_) | PauliTerm::ZZ(..)) => term,
                (Basis::X, PauliTerm::X(i)) => PauliTerm::Z(i),
                _ => {
                    return Err(Error::BasisMismatch {
                        term: term.to_string(),
                        basis: record.basis.to_string(),
                    })
                }
            };
            let mut signed = 0i64;
            for (b, &c) in counts.iter().enumerate() {
                if c > 0 {
                    let v = readout.diagonal_value(b).unwrap_or_default();
                    signed += if v > 0.0 { c as i64 } else { -(c as i64) };
                }
            }
            Ok(ExpectationEstimate::new(term, signed as f64 / n as f64, n))
        })
        .collect()
}

/// `E = −J Σ⟨Z_iZ_{i+1}⟩ − h Σ⟨X_i⟩` and its propagated error.
pub fn reconstruct_energy(
    model: &SpinChainModel,
    zz_estimates: &[ExpectationEstimate],
    x_estimates: &[ExpectationEstimate],
) -> Result<(f64, f64)> {
    let n = model.n_spins();
    if zz_estimates.len() != n - 1 {
        return Err(Error::CountMismatch {
            what: "bond ZZ estimates",
            expected: n - 1,
            got: zz_estimates.len(),
        });
    }
    if x_estimates.len() != n {
        return Err(Error::CountMismatch {
            what: "site X estimates",
            expected: n,
            got: x_estimates.len(),
        });
    }
    let j = model.coupling();
    let h = model.field();
    let zz_sum: f64 = zz_estimates.iter().map(|e| e.mean).sum();
    let x_sum: f64 = x_estimates.iter().map(|e| e.mean).sum();
    let zz_var: f64 = zz_estimates.iter().map(|e| e.std_error * e.std_error).sum();
    let x_var: f64 = x_estimates.iter().map(|e| e.std_error * e.std_error).sum();
    Ok((
        -j * zz_sum - h * x_sum,
        (j * j * zz_var + h * h * x_var).sqrt(),
    ))
}

/// `|Σ⟨Z_i⟩/N|` with the error of the signed mean.
pub fn absolute_magnetization(z_estimates: &[ExpectationEstimate]) -> (f64, f64) {
    let n = z_estimates.len() as f64;
    if z_estimates.is_empty() {
        return (0.0, 0.0);
    }
    let mean = z_estimates.iter().map(|e| e.mean).sum::<f64>() / n;
    let var: f64 = z_estimates.iter().map(|e| e.std_error * e.std_error).sum();
    (mean.abs(), var.sqrt() / n)
}

/// How a plan entry's register is prepared before measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    /// Ansatz gates applied to `|0…0⟩`.
    Circuit(Vec<GateOp>),
    /// A state supplied directly, e.g. an exact ground state.
    State(QuantumState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub field: f64,
    pub basis: Basis,
    pub preparation: Preparation,
    pub n_shots: usize,
}

/// Every (field, basis) circuit of one batch; two entries per field value,
/// Z then X, sharing the same preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub n_qubits: usize,
    pub entries: Vec<PlanEntry>,
}

impl MeasurementPlan {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            entries: Vec::new(),
        }
    }

    /// Adds the Z/X pair for one field value.
    pub fn push_field(&mut self, field: f64, preparation: Preparation, n_shots: usize) {
        for basis in [Basis::Z, Basis::X] {
            self.entries.push(PlanEntry {
                field,
                basis,
                preparation: preparation.clone(),
                n_shots,
            });
        }
    }

    /// Plan built from stored optimal parameters, one field per record.
    pub fn from_records(
        n_qubits: usize,
        records: &[ParameterRecord],
        n_shots: usize,
    ) -> Result<Self> {
        let mut plan = Self::new(n_qubits);
        for r in records {
            let params = r.parameters(n_qubits)?;
            let circuit = crate::ansatz::build_circuit(&params.spec, &params.values)?;
            plan.push_field(r.field, Preparation::Circuit(circuit), n_shots);
        }
        Ok(plan)
    }

    /// Plan for `field_grid`, looking up each field in `records`.
    pub fn for_grid(
        n_qubits: usize,
        field_grid: &[f64],
        records: &[ParameterRecord],
        n_shots: usize,
    ) -> Result<Self> {
        let selected = field_grid
            .iter()
            .map(|&h| {
                records
                    .iter()
                    .find(|r| (r.field - h).abs() < 1e-12)
                    .cloned()
                    .ok_or(Error::MissingRecord(h))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_records(n_qubits, &selected, n_shots)
    }

    pub fn fields(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.field) {
                out.push(e.field);
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        for h in self.fields() {
            let bases: Vec<Basis> = self
                .entries
                .iter()
                .filter(|e| e.field == h)
                .map(|e| e.basis)
                .collect();
            if bases.len() != 2 || !bases.contains(&Basis::Z) || !bases.contains(&Basis::X) {
                return Err(Error::Config(format!(
                    "plan needs exactly one Z and one X entry at h = {h}"
                )));
            }
        }
        if self.entries.iter().any(|e| e.n_shots == 0) {
            return Err(Error::Config(
                "every plan entry needs at least one shot".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    IdealSampled,
    Noisy,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::IdealSampled => "ideal_sampled",
            Backend::Noisy => "noisy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ideal_sampled" | "ideal" => Some(Self::IdealSampled),
            "noisy" => Some(Self::Noisy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackendResult {
    pub field: f64,
    pub energy: f64,
    pub energy_err: f64,
    pub abs_mz: f64,
    pub mz_err: f64,
    /// Site-averaged `⟨X⟩`.
    pub x_mean: f64,
    /// Bond-averaged `⟨Z_iZ_{i+1}⟩`.
    pub zz_mean: f64,
    pub estimates: Vec<ExpectationEstimate>,
}

/// Assembles the per-field observables from Z-basis and X-basis estimates.
pub fn assemble_backend_result(
    model: &SpinChainModel,
    z_estimates: &[ExpectationEstimate],
    x_estimates: &[ExpectationEstimate],
) -> Result<BackendResult> {
    let n = model.n_spins();
    let pick = |ests: &[ExpectationEstimate],
                f: &dyn Fn(&PauliTerm) -> bool|
     -> Vec<ExpectationEstimate> {
        ests.iter().filter(|e| f(&e.observable)).copied().collect()
    };
    let z_sites = pick(z_estimates, &|t| matches!(t, PauliTerm::Z(_)));
    let zz_bonds = pick(
        z_estimates,
        &|t| matches!(t, PauliTerm::ZZ(a, b) if b == &(a + 1)),
    );
    let x_sites = pick(x_estimates, &|t| matches!(t, PauliTerm::X(_)));
    if z_sites.len() != n {
        return Err(Error::CountMismatch {
            what: "site Z estimates",
            expected: n,
            got: z_sites.len(),
        });
    }
    let (energy, energy_err) = reconstruct_energy(model, &zz_bonds, &x_sites)?;
    let (abs_mz, mz_err) = absolute_magnetization(&z_sites);
    let x_mean = x_sites.iter().map(|e| e.mean).sum::<f64>() / n as f64;
    let zz_mean = zz_bonds.iter().map(|e| e.mean).sum::<f64>() / (n - 1) as f64;
    let mut estimates = z_sites;
    estimates.extend(zz_bonds);
    estimates.extend(x_sites);
    Ok(BackendResult {
        field: model.field(),
        energy,
        energy_err,
        abs_mz,
        mz_err,
        x_mean,
        zz_mean,
        estimates,
    })
}

/// Terms read from each basis: `Z_i` and bond `Z_iZ_{i+1}` from Z, `X_i` from X.
pub fn basis_terms(n_qubits: usize, basis: Basis) -> Vec<PauliTerm> {
    match basis {
        Basis::Z => (0..n_qubits)
            .map(PauliTerm::Z)
            .chain((0..n_qubits - 1).map(|i| PauliTerm::ZZ(i, i + 1)))
            .collect(),
        Basis::X => (0..n_qubits).map(PauliTerm::X).collect(),
    }
}

/// Seed of plan entry `index` under a master seed.
pub fn entry_seed(master: u64, index: usize) -> u64 {
    rng_stream(master, 1 << 32 | index as u64).gen()
}

/// One executed plan entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutedCircuit {
    pub field: f64,
    pub basis: Basis,
    pub seed: u64,
    pub record: ShotRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub results: Vec<BackendResult>,
    pub executed: Vec<ExecutedCircuit>,
}

fn execute_entry(
    entry: &PlanEntry,
    n_qubits: usize,
    backend: Backend,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<ShotRecord> {
    match (backend, &entry.preparation) {
        (Backend::IdealSampled, Preparation::Circuit(c)) => sample(
            &run_circuit(n_qubits, c)?,
            entry.basis,
            entry.n_shots,
            seed,
            None,
        ),
        (Backend::IdealSampled, Preparation::State(s)) => {
            sample(s, entry.basis, entry.n_shots, seed, None)
        }
        (Backend::Noisy, Preparation::Circuit(c)) => {
            sample_noisy_circuit(n_qubits, c, entry.basis, entry.n_shots, noise, seed)
        }
        // An injected state has no gates to corrupt; only readout noise applies.
        (Backend::Noisy, Preparation::State(s)) => {
            sample(s, entry.basis, entry.n_shots, seed, Some(noise))
        }
    }
}

/// Executes the whole plan as one unit under `master_seed` and assembles one
/// [`BackendResult`] per field value, in plan order.
///
/// Entries run on up to `threads` workers; results do not depend on the
/// thread count.
pub fn run_batched_job(
    plan: &MeasurementPlan,
    template: &SpinChainModel,
    backend: Backend,
    noise: Option<&NoiseSpec>,
    master_seed: u64,
    threads: usize,
) -> Result<BatchOutput> {
    plan.validate()?;
    if plan.n_qubits != template.n_spins() {
        return Err(Error::Dimension {
            expected: template.n_spins(),
            got: plan.n_qubits,
        });
    }
    let noise = match (backend, noise) {
        (Backend::Noisy, Some(n)) => *n,
        (Backend::Noisy, None) => NoiseSpec::default(),
        (Backend::IdealSampled, _) => NoiseSpec::noiseless(),
    };
    noise.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let executed: Vec<ExecutedCircuit> = pool.install(|| {
        plan.entries
            .par_iter()
            .enumerate()
            .map(|(k, entry)| {
                let seed = entry_seed(master_seed, k);
                let record = execute_entry(entry, plan.n_qubits, backend, &noise, seed)?;
                Ok(ExecutedCircuit {
                    field: entry.field,
                    basis: entry.basis,
                    seed,
                    record,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut results = Vec::new();
    for h in plan.fields() {
        let model = template.with_field(h)?;
        let find = |basis| {
            executed
                .iter()
                .find(|e| e.field == h && e.basis == basis)
                .expect("validated plan has both bases")
        };
        let z = expectations_from_shots(
            &find(Basis::Z).record,
            &basis_terms(plan.n_qubits, Basis::Z),
        )?;
        let x = expectations_from_shots(
            &find(Basis::X).record,
            &basis_terms(plan.n_qubits, Basis::X),
        )?;
        results.push(assemble_backend_result(&model, &z, &x)?);
    }
    Ok(BatchOutput { results, executed })
}

pub const SHOT_ARCHIVE_HEADER: &str = "# tfim shot archive v1";

/// Plain-text archive: a `circuit` line per executed entry followed by
/// `<bitstring> <count>` lines for every observed outcome (qubit 0 first),
/// closed by `end`.
pub fn format_shot_archive(executed: &[ExecutedCircuit]) -> String {
    let mut out = String::new();
    writeln!(out, "{SHOT_ARCHIVE_HEADER}").unwrap();
    for e in executed {
        writeln!(
            out,
            "circuit h={} basis={} seed={} shots={} qubits={}",
            e.field,
            e.basis,
            e.seed,
            e.record.n_shots(),
            e.record.n_qubits
        )
        .unwrap();
        for (b, c) in e.record.counts().iter().enumerate() {
            if *c > 0 {
                writeln!(out, "{} {c}", bitstring(b, e.record.n_qubits)).unwrap();
            }
        }
        writeln!(out, "end").unwrap();
    }
    out
}

pub fn write_shot_archive(path: &Path, executed: &[ExecutedCircuit]) -> Result<()> {
    fs::write(path, format_shot_archive(executed))?;
    Ok(())
}

/// Histogram of one archived circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedCircuit {
    pub field: f64,
    pub basis: Basis,
    pub seed: u64,
    pub n_qubits: usize,
    pub counts: Vec<usize>,
}

impl ArchivedCircuit {
    /// Shot record with outcomes in ascending basis-state order.
    pub fn to_record(&self) -> ShotRecord {
        let outcomes = self
            .counts
            .iter()
            .enumerate()
            .flat_map(|(b, &c)| std::iter::repeat_n(b, c))
            .collect();
        ShotRecord {
            n_qubits: self.n_qubits,
            basis: self.basis,
            outcomes,
        }
    }
}

pub fn read_shot_archive(path: &Path) -> Result<Vec<ArchivedCircuit>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let err = |n: usize, msg: &str| Error::Parse {
        path: path.display().to_string(),
        msg: format!("line {}: {msg}", n + 1),
    };
    let mut out = Vec::new();
    let mut current: Option<(ArchivedCircuit, usize)> = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("circuit ") {
            if current.is_some() {
                return Err(err(n, "circuit block not closed"));
            }
            let mut field = None;
            let mut basis = None;
            let mut seed = None;
            let mut shots = None;
            let mut qubits = None;
            for tok in rest.split_whitespace() {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| err(n, "expected key=value"))?;
                match k {
                    "h" => field = v.parse::<f64>().ok(),
                    "basis" => basis = v.parse::<Basis>().ok(),
                    "seed" => seed = v.parse::<u64>().ok(),
                    "shots" => shots = v.parse::<usize>().ok(),
                    "qubits" => qubits = v.parse::<usize>().ok(),
                    _ => return Err(err(n, "unknown key")),
                }
            }
            let (Some(field), Some(basis), Some(seed), Some(shots), Some(n_qubits)) =
                (field, basis, seed, shots, qubits)
            else {
                return Err(err(n, "incomplete circuit header"));
            };
            current = Some((
                ArchivedCircuit {
                    field,
                    basis,
                    seed,
                    n_qubits,
                    counts: vec![0; 1 << n_qubits],
                },
                shots,
            ));
        } else if line == "end" {
            let (c, shots) = current
                .take()
                .ok_or_else(|| err(n, "end without circuit"))?;
            if c.counts.iter().sum::<usize>() != shots {
                return Err(err(n, "counts do not add up to shots"));
            }
            out.push(c);
        } else {
            let (c, _) = current
                .as_mut()
                .ok_or_else(|| err(n, "counts outside a circuit block"))?;
            let (bits, count) = line
                .split_once(' ')
                .ok_or_else(|| err(n, "expected '<bits> <count>'"))?;
            if bits.len() != c.n_qubits {
                return Err(err(n, "bitstring length differs from qubit count"));
            }
            let idx = parse_bitstring(bits).ok_or_else(|| err(n, "bad bitstring"))?;
            c.counts[idx] += count
                .trim()
                .parse::<usize>()
                .map_err(|_| err(n, "bad count"))?;
        }
    }
    if current.is_some() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            msg: "unterminated circuit block".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n_qubits: usize, basis: Basis, outcomes: Vec<usize>) -> ShotRecord {
        ShotRecord {
            n_qubits,
            basis,
            outcomes,
        }
    }

    #[test]
    fn all_zero_shots() {
        let r = record(4, Basis::Z, vec![0; 1000]);
        let e = expectations_from_shots(&r, &[PauliTerm::Z(0)]).unwrap();
        assert_eq!(e[0].mean, 1.0);
        assert_eq!(e[0].std_error, 0.0);
    }

    #[test]
    fn ghz_like_counts() {
        let mut outcomes = vec![0b00; 500];
        outcomes.extend(vec![0b11; 500]);
        let r = record(2, Basis::Z, outcomes);
        let e = expectations_from_shots(&r, &[PauliTerm::ZZ(0, 1), PauliTerm::Z(0)]).unwrap();
        assert_eq!((e[0].mean, e[0].std_error), (1.0, 0.0));
        assert_eq!(e[1].mean, 0.0);
        assert!((e[1].std_error - (1.0f64 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn std_error_closed_form() {
        assert!((binomial_std_error(0.5, 4096) - 0.013_531_646_934_131_853).abs() < 1e-15);
        assert_eq!(binomial_std_error(-1.0, 10), 0.0);
        assert_eq!(binomial_std_error(0.0, 1), 1.0);
    }

    #[test]
    fn basis_mismatch() {
        let z = record(2, Basis::Z, vec![0; 4]);
        assert!(matches!(
            expectations_from_shots(&z, &[PauliTerm::X(0)]),
            Err(Error::BasisMismatch { .. })
        ));
        let x = record(2, Basis::X, vec![0; 4]);
        assert!(matches!(
            expectations_from_shots(&x, &[PauliTerm::Z(0)]),
            Err(Error::BasisMismatch { .. })
        ));
        assert_eq!(
            expectations_from_shots(&x, &[PauliTerm::X(1)]).unwrap()[0].mean,
            1.0
        );
    }

    #[test]
    fn magnetization_sign_and_cancellation() {
        let down: Vec<_> = (0..4)
            .map(|i| ExpectationEstimate::exact(PauliTerm::Z(i), -1.0))
            .collect();
        assert_eq!(absolute_magnetization(&down), (1.0, 0.0));
        let mixed: Vec<_> = [1.0, 1.0, -1.0, -1.0]
            .iter()
            .enumerate()
            .map(|(i, &m)| ExpectationEstimate::exact(PauliTerm::Z(i), m))
            .collect();
        assert_eq!(absolute_magnetization(&mixed).0, 0.0);
    }

    #[test]
    fn exact_inputs_have_no_energy_error() {
        let m = SpinChainModel::new(4, 1.0, 0.7).unwrap();
        let zz: Vec<_> = (0..3)
            .map(|i| ExpectationEstimate::new(PauliTerm::ZZ(i, i + 1), 1.0, 100))
            .collect();
        let x: Vec<_> = (0..4)
            .map(|i| ExpectationEstimate::new(PauliTerm::X(i), -1.0, 100))
            .collect();
        let (e, err) = reconstruct_energy(&m, &zz, &x).unwrap();
        assert!((e - (-3.0 + 2.8)).abs() < 1e-12);
        assert_eq!(err, 0.0);
        assert!(matches!(
            reconstruct_energy(&m, &zz[..2], &x),
            Err(Error::CountMismatch { .. })
        ));
    }

    #[test]
    fn plan_requires_both_bases() {
        let mut plan = MeasurementPlan::new(2);
        plan.entries.push(PlanEntry {
            field: 0.2,
            basis: Basis::Z,
            preparation: Preparation::Circuit(vec![]),
            n_shots: 8,
        });
        let m = SpinChainModel::new(2, 1.0, 0.2).unwrap();
        assert!(run_batched_job(&plan, &m, Backend::IdealSampled, None, 1, 1).is_err());
    }

    #[test]
    fn missing_record_is_reported() {
        assert!(matches!(
            MeasurementPlan::for_grid(4, &[0.2], &[], 16),
            Err(Error::MissingRecord(_))
        ));
    }
}
