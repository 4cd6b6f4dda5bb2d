//! Layered ansatz: each layer is an RZZ on every bond followed by an RX on
//! every site, applied to `|0…0⟩`.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{term_expectation_unchecked, PauliTerm, SpinChainModel};
use crate::statevector::{run_circuit, GateOp, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ParameterMode {
    /// Independent angle on every gate.
    #[default]
    PerGate,
    /// One RZZ angle and one RX angle shared within each layer.
    PerLayer,
}

impl ParameterMode {
    pub fn name(&self) -> &'static str {
        match self {
            ParameterMode::PerGate => "per_gate",
            ParameterMode::PerLayer => "per_layer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "per_gate" => Some(Self::PerGate),
            "per_layer" => Some(Self::PerLayer),
            _ => None,
        }
    }
}

impl fmt::Display for ParameterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnsatzSpec {
    pub n_spins: usize,
    pub depth: usize,
    pub mode: ParameterMode,
}

impl AnsatzSpec {
    pub fn new(n_spins: usize, depth: usize, mode: ParameterMode) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::Config(format!(
                "ansatz needs at least 2 spins, got {n_spins}"
            )));
        }
        if depth == 0 {
            return Err(Error::Config("ansatz depth must be at least 1".into()));
        }
        Ok(Self {
            n_spins,
            depth,
            mode,
        })
    }

    /// Free angles per layer.
    pub fn layer_parameters(&self) -> usize {
        match self.mode {
            ParameterMode::PerGate => 2 * self.n_spins - 1,
            ParameterMode::PerLayer => 2,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.depth * self.layer_parameters()
    }

    pub fn gate_count(&self) -> usize {
        self.depth * (2 * self.n_spins - 1)
    }

    /// Expands per-layer angles into the equivalent per-gate vector.
    pub fn expand_to_per_gate(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check_len(values)?;
        Ok(match self.mode {
            ParameterMode::PerGate => values.to_vec(),
            ParameterMode::PerLayer => values
                .chunks(2)
                .flat_map(|layer| {
                    std::iter::repeat_n(layer[0], self.n_spins - 1)
                        .chain(std::iter::repeat_n(layer[1], self.n_spins))
                })
                .collect(),
        })
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.parameter_count() {
            return Err(Error::ParameterLength {
                expected: self.parameter_count(),
                got: values.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzParameters {
    pub spec: AnsatzSpec,
    pub values: Vec<f64>,
}

impl AnsatzParameters {
    pub fn new(spec: AnsatzSpec, values: Vec<f64>) -> Result<Self> {
        spec.check_len(&values)?;
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: AnsatzSpec) -> Self {
        Self {
            spec,
            values: vec![0.0; spec.parameter_count()],
        }
    }
}

/// Gate list for `values` under `spec`: per layer, RZZ on bonds
/// `(0,1), …, (N−2,N−1)` then RX on sites `0..N`.
pub fn build_circuit(spec: &AnsatzSpec, values: &[f64]) -> Result<Vec<GateOp>> {
    let angles = spec.expand_to_per_gate(values)?;
    let n = spec.n_spins;
    let mut gates = Vec::with_capacity(spec.gate_count());
    for layer in angles.chunks(2 * n - 1) {
        let (zz, rx) = layer.split_at(n - 1);
        gates.extend(zz.iter().enumerate().map(|(i, &angle)| GateOp::Rzz {
            site_a: i,
            site_b: i + 1,
            angle,
        }));
        gates.extend(
            rx.iter()
                .enumerate()
                .map(|(site, &angle)| GateOp::Rx { site, angle }),
        );
    }
    Ok(gates)
}

/// Noiseless ansatz state for `values`.
pub fn prepare_state(spec: &AnsatzSpec, values: &[f64]) -> Result<QuantumState> {
    run_circuit(spec.n_spins, &build_circuit(spec, values)?)
}

/// `⟨ψ|H|ψ⟩` evaluated term by term on an exact state.
pub fn model_energy(model: &SpinChainModel, state: &QuantumState) -> Result<f64> {
    if state.n_qubits() != model.n_spins() {
        return Err(Error::Dimension {
            expected: model.n_spins(),
            got: state.n_qubits(),
        });
    }
    let amps = state.amplitudes();
    let zz: f64 = model
        .bonds()
        .map(|(i, j)| term_expectation_unchecked(PauliTerm::ZZ(i, j), amps))
        .sum();
    let x: f64 = (0..model.n_spins())
        .map(|i| term_expectation_unchecked(PauliTerm::X(i), amps))
        .sum();
    Ok(-model.coupling() * zz - model.field() * x)
}

/// Variational energy `E(θ)` on the noiseless statevector.
pub fn energy_of(values: &[f64], spec: &AnsatzSpec, model: &SpinChainModel) -> Result<f64> {
    if spec.n_spins != model.n_spins() {
        return Err(Error::Dimension {
            expected: model.n_spins(),
            got: spec.n_spins,
        });
    }
    model_energy(model, &prepare_state(spec, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        let g = AnsatzSpec::new(4, 2, ParameterMode::PerGate).unwrap();
        let l = AnsatzSpec::new(4, 2, ParameterMode::PerLayer).unwrap();
        assert_eq!(g.parameter_count(), 14);
        assert_eq!(l.parameter_count(), 4);
        assert!(AnsatzSpec::new(4, 0, ParameterMode::PerGate).is_err());
    }

    #[test]
    fn depth_one_zero_angles_is_identity() {
        let spec = AnsatzSpec::new(4, 1, ParameterMode::PerGate).unwrap();
        let gates = build_circuit(&spec, &[0.0; 7]).unwrap();
        assert_eq!(gates.len(), 7);
        let s = run_circuit(4, &gates).unwrap();
        assert!((s.amplitudes()[0].norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn depth_two_gate_order() {
        let spec = AnsatzSpec::new(4, 2, ParameterMode::PerGate).unwrap();
        let gates = build_circuit(&spec, &[0.1; 14]).unwrap();
        let kinds: String = gates
            .iter()
            .map(|g| if g.is_two_qubit() { 'Z' } else { 'R' })
            .collect();
        assert_eq!(kinds, "ZZZRRRRZZZRRRR");
        assert_eq!(
            gates[1],
            GateOp::Rzz {
                site_a: 1,
                site_b: 2,
                angle: 0.1
            }
        );
        assert_eq!(
            gates[6],
            GateOp::Rx {
                site: 3,
                angle: 0.1
            }
        );
    }

    #[test]
    fn per_layer_matches_repeated_per_gate() {
        let layer = AnsatzSpec::new(4, 2, ParameterMode::PerLayer).unwrap();
        let gate = AnsatzSpec::new(4, 2, ParameterMode::PerGate).unwrap();
        let shared = [0.3, -0.7, 1.1, 0.25];
        let repeated = [
            0.3, 0.3, 0.3, -0.7, -0.7, -0.7, -0.7, 1.1, 1.1, 1.1, 0.25, 0.25, 0.25, 0.25,
        ];
        assert_eq!(
            build_circuit(&layer, &shared).unwrap(),
            build_circuit(&gate, &repeated).unwrap()
        );
    }

    #[test]
    fn length_mismatch() {
        let spec = AnsatzSpec::new(4, 2, ParameterMode::PerGate).unwrap();
        assert!(matches!(
            build_circuit(&spec, &[0.0; 13]),
            Err(Error::ParameterLength {
                expected: 14,
                got: 13
            })
        ));
    }

    #[test]
    fn zero_angles_give_classical_energy() {
        let spec = AnsatzSpec::new(4, 2, ParameterMode::PerGate).unwrap();
        for h in [0.0, 0.2, 1.0, 1.8] {
            let m = SpinChainModel::new(4, 1.0, h).unwrap();
            assert!((energy_of(&[0.0; 14], &spec, &m).unwrap() + 3.0).abs() < 1e-14);
        }
    }
}
