//! Complex statevector simulator for the ansatz gate set, projective shot
//! sampling in the Z or X basis, and stochastic Pauli-trajectory noise.
//!
//! Gate conventions:
//! - `RX(θ) = exp(−iθX/2)`
//! - `RZZ(θ) = exp(−iθ Z⊗Z/2)`: phase `e^{−iθ/2}` when the two bits agree,
//!   `e^{+iθ/2}` when they differ
//! - `HAD` is the standard Hadamard.

use std::fmt;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{term_expectation_unchecked, PauliTerm, NORM_TOLERANCE};

/// Deterministic RNG stream `stream` derived from a master seed.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩`, the all-up product state.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Dimension {
                expected: dim.next_power_of_two().max(2),
                got: dim,
            });
        }
        let state = Self {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        };
        state.check_normalized()?;
        Ok(state)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amplitudes(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Exact expectation of a Pauli term.
    pub fn expectation(&self, term: PauliTerm) -> Result<f64> {
        term.validate(self.n_qubits)?;
        Ok(term_expectation_unchecked(term, &self.amplitudes))
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_qubits {
            return Err(Error::SiteOutOfRange {
                site,
                n_spins: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies a 2×2 unitary `[[m00, m01], [m10, m11]]` to one qubit.
    fn apply_single(&mut self, site: usize, m: [[Complex64; 2]; 2]) {
        let mask = 1usize << site;
        for b in 0..self.amplitudes.len() {
            if b & mask == 0 {
                let a0 = self.amplitudes[b];
                let a1 = self.amplitudes[b | mask];
                self.amplitudes[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[b | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_pauli(&mut self, site: usize, pauli: Pauli) {
        let mask = 1usize << site;
        match pauli {
            Pauli::I => {}
            Pauli::X => {
                for b in 0..self.amplitudes.len() {
                    if b & mask == 0 {
                        self.amplitudes.swap(b, b | mask);
                    }
                }
            }
            Pauli::Y => {
                // Y = [[0, −i], [i, 0]]
                let i = Complex64::new(0.0, 1.0);
                for b in 0..self.amplitudes.len() {
                    if b & mask == 0 {
                        let a0 = self.amplitudes[b];
                        let a1 = self.amplitudes[b | mask];
                        self.amplitudes[b] = -i * a1;
                        self.amplitudes[b | mask] = i * a0;
                    }
                }
            }
            Pauli::Z => {
                for b in 0..self.amplitudes.len() {
                    if b & mask != 0 {
                        self.amplitudes[b] = -self.amplitudes[b];
                    }
                }
            }
        }
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        match *gate {
            GateOp::Rx { site, angle } => {
                self.check_site(site)?;
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(angle / 2.0).sin());
                self.apply_single(site, [[c, s], [s, c]]);
            }
            GateOp::Had { site } => {
                self.check_site(site)?;
                let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(site, [[r, r], [r, -r]]);
            }
            GateOp::Rzz {
                site_a,
                site_b,
                angle,
            } => {
                self.check_site(site_a)?;
                self.check_site(site_b)?;
                if site_a == site_b {
                    return Err(Error::InvalidTerm(format!("RZZ on repeated site {site_a}")));
                }
                let equal = Complex64::from_polar(1.0, -angle / 2.0);
                let unequal = Complex64::from_polar(1.0, angle / 2.0);
                for (b, a) in self.amplitudes.iter_mut().enumerate() {
                    let differ = (b >> site_a ^ b >> site_b) & 1 == 1;
                    *a *= if differ { unequal } else { equal };
                }
            }
        }
        Ok(())
    }
}

/// Gate applied by value; returns the evolved state.
pub fn apply_gate(mut state: QuantumState, gate: &GateOp) -> Result<QuantumState> {
    state.apply(gate)?;
    Ok(state)
}

/// Runs a circuit noiselessly from `|0…0⟩`.
pub fn run_circuit(n_qubits: usize, circuit: &[GateOp]) -> Result<QuantumState> {
    let mut state = QuantumState::zero(n_qubits);
    for gate in circuit {
        state.apply(gate)?;
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Rx {
        site: usize,
        angle: f64,
    },
    Rzz {
        site_a: usize,
        site_b: usize,
        angle: f64,
    },
    Had {
        site: usize,
    },
}

impl GateOp {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Rzz { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Z,
    X,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
        })
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(Basis::Z),
            "X" => Ok(Basis::X),
            _ => Err(Error::Config(format!("unknown basis {s:?}"))),
        }
    }
}

/// Stochastic noise: depolarizing after gates, classical bit flips at readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub p1: f64,
    pub p2: f64,
    pub p_readout: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            p1: 0.002,
            p2: 0.02,
            p_readout: 0.03,
        }
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            p_readout: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_readout", self.p_readout),
        ] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} must lie in [0, 1)")));
            }
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate) but allowing probability 1, used only
    /// for channel-algebra checks.
    fn validate_closed(&self) -> Result<()> {
        for p in [self.p1, self.p2, self.p_readout] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Measured bitstrings; bit `i` of each entry is qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord {
    pub n_qubits: usize,
    pub basis: Basis,
    pub outcomes: Vec<usize>,
}

impl ShotRecord {
    pub fn n_shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn bitstring(&self, shot: usize) -> String {
        bitstring(self.outcomes[shot], self.n_qubits)
    }

    /// Histogram of outcomes, indexed by basis state.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; 1 << self.n_qubits];
        for &o in &self.outcomes {
            counts[o] += 1;
        }
        counts
    }
}

/// Qubit 0 printed first.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|i| if index >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Option<usize> {
    s.chars()
        .enumerate()
        .try_fold(0usize, |acc, (i, ch)| match ch {
            '0' => Some(acc),
            '1' => Some(acc | 1 << i),
            _ => None,
        })
}

fn rotate_to_basis(state: &mut QuantumState, basis: Basis) {
    if basis == Basis::X {
        for site in 0..state.n_qubits {
            // Sites are in range by construction.
            let _ = state.apply(&GateOp::Had { site });
        }
    }
}

fn flip_readout<R: Rng>(outcome: usize, n_qubits: usize, p_readout: f64, rng: &mut R) -> usize {
    let mut o = outcome;
    for i in 0..n_qubits {
        if rng.gen::<f64>() < p_readout {
            o ^= 1 << i;
        }
    }
    o
}

/// Projective sampling of `n_shots` outcomes in the requested basis.
///
/// With noise, each outcome bit is flipped independently with `p_readout`;
/// gate noise is the business of [`run_noisy_trajectory`].
pub fn sample(
    state: &QuantumState,
    basis: Basis,
    n_shots: usize,
    seed: u64,
    noise: Option<&NoiseSpec>,
) -> Result<ShotRecord> {
    state.check_normalized()?;
    if n_shots == 0 {
        return Err(Error::Config("n_shots must be at least 1".into()));
    }
    if let Some(noise) = noise {
        noise.validate()?;
    }
    let mut rotated = state.clone();
    rotate_to_basis(&mut rotated, basis);
    let dist = WeightedIndex::new(rotated.probabilities())
        .map_err(|e| Error::Numerical(format!("cannot sample state: {e}")))?;
    let mut rng = rng_stream(seed, 0);
    let p_readout = noise.map_or(0.0, |n| n.p_readout);
    let outcomes = (0..n_shots)
        .map(|_| {
            let o = dist.sample(&mut rng);
            if p_readout > 0.0 {
                flip_readout(o, state.n_qubits, p_readout, &mut rng)
            } else {
                o
            }
        })
        .collect();
    Ok(ShotRecord {
        n_qubits: state.n_qubits,
        basis,
        outcomes,
    })
}

fn noisy_gate<R: Rng>(
    state: &mut QuantumState,
    gate: &GateOp,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<()> {
    state.apply(gate)?;
    match *gate {
        GateOp::Rx { site, .. } | GateOp::Had { site } => {
            if noise.p1 > 0.0 && rng.gen::<f64>() < noise.p1 {
                state.apply_pauli(site, PAULIS[rng.gen_range(1..4)]);
            }
        }
        GateOp::Rzz { site_a, site_b, .. } => {
            if noise.p2 > 0.0 && rng.gen::<f64>() < noise.p2 {
                // 15 non-identity pairs, indexed 1..16 as (a, b) in base 4.
                let k = rng.gen_range(1..16);
                state.apply_pauli(site_a, PAULIS[k / 4]);
                state.apply_pauli(site_b, PAULIS[k % 4]);
            }
        }
    }
    Ok(())
}

/// One stochastic trajectory of `circuit` from `|0…0⟩`.
///
/// After each single-qubit gate a uniformly random X, Y or Z hits that site
/// with probability `p1`; after each two-qubit gate one of the 15 non-identity
/// Pauli pairs hits the pair with probability `p2`.
pub fn run_noisy_trajectory(
    n_qubits: usize,
    circuit: &[GateOp],
    noise: &NoiseSpec,
    seed: u64,
) -> Result<QuantumState> {
    noise.validate_closed()?;
    let mut rng = rng_stream(seed, 0);
    trajectory_with_rng(n_qubits, circuit, noise, &mut rng)
}

fn trajectory_with_rng<R: Rng>(
    n_qubits: usize,
    circuit: &[GateOp],
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<QuantumState> {
    let mut state = QuantumState::zero(n_qubits);
    for gate in circuit {
        noisy_gate(&mut state, gate, noise, rng)?;
    }
    Ok(state)
}

/// Noisy shots: one fresh trajectory per shot, the basis rotation layer is
/// itself subject to single-qubit noise, then readout flips.
pub fn sample_noisy_circuit(
    n_qubits: usize,
    circuit: &[GateOp],
    basis: Basis,
    n_shots: usize,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<ShotRecord> {
    noise.validate()?;
    if n_shots == 0 {
        return Err(Error::Config("n_shots must be at least 1".into()));
    }
    let rotation: Vec<GateOp> = match basis {
        Basis::Z => Vec::new(),
        Basis::X => (0..n_qubits).map(|site| GateOp::Had { site }).collect(),
    };
    let mut rng = rng_stream(seed, 0);
    let mut outcomes = Vec::with_capacity(n_shots);
    for _ in 0..n_shots {
        let mut state = trajectory_with_rng(n_qubits, circuit, noise, &mut rng)?;
        for gate in &rotation {
            noisy_gate(&mut state, gate, noise, &mut rng)?;
        }
        let dist = WeightedIndex::new(state.probabilities())
            .map_err(|e| Error::Numerical(format!("cannot sample state: {e}")))?;
        let o = dist.sample(&mut rng);
        outcomes.push(flip_readout(o, n_qubits, noise.p_readout, &mut rng));
    }
    Ok(ShotRecord {
        n_qubits,
        basis,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn rx_pi_flips_with_phase() {
        let s = apply_gate(QuantumState::zero(1), &GateOp::Rx { site: 0, angle: PI }).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(0.0, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, -1.0)));
        assert!((s.expectation(PauliTerm::Z(0)).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rx_bloch_vector_matches_matrix_algebra() {
        // RX(θ)|0⟩ = (cos θ/2, −i sin θ/2): ⟨Z⟩ = cos θ, ⟨X⟩ = 0, ⟨Y⟩ = −sin θ.
        for k in 0..16 {
            let theta = -PI + 2.0 * PI * k as f64 / 16.0;
            let s = apply_gate(
                QuantumState::zero(1),
                &GateOp::Rx {
                    site: 0,
                    angle: theta,
                },
            )
            .unwrap();
            let a = s.amplitudes();
            let y = 2.0 * (a[0].conj() * a[1]).im;
            assert!((s.expectation(PauliTerm::Z(0)).unwrap() - theta.cos()).abs() < 1e-12);
            assert!(s.expectation(PauliTerm::X(0)).unwrap().abs() < 1e-12);
            assert!((y + theta.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn rzz_on_basis_state_is_global_phase() {
        let s = apply_gate(
            QuantumState::zero(2),
            &GateOp::Rzz {
                site_a: 0,
                site_b: 1,
                angle: 0.7,
            },
        )
        .unwrap();
        assert_eq!(s.probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(close(s.amplitudes()[0], Complex64::from_polar(1.0, -0.35)));
    }

    #[test]
    fn gate_site_errors() {
        let s = QuantumState::zero(2);
        assert!(matches!(
            apply_gate(
                s.clone(),
                &GateOp::Rx {
                    site: 2,
                    angle: 0.1
                }
            ),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(apply_gate(
            s,
            &GateOp::Rzz {
                site_a: 1,
                site_b: 1,
                angle: 0.1
            }
        )
        .is_err());
    }

    #[test]
    fn zero_state_samples_all_zero() {
        let r = sample(&QuantumState::zero(4), Basis::Z, 100, 1, None).unwrap();
        assert_eq!(r.n_shots(), 100);
        assert!((0..100).all(|k| r.bitstring(k) == "0000"));
    }

    #[test]
    fn plus_state_in_x_basis_reads_zero() {
        let mut s = QuantumState::zero(3);
        for site in 0..3 {
            s.apply(&GateOp::Had { site }).unwrap();
        }
        let r = sample(&s, Basis::X, 500, 9, None).unwrap();
        assert!(r.outcomes.iter().all(|&o| o == 0));
    }

    #[test]
    fn readout_flip_rate() {
        let noise = NoiseSpec {
            p1: 0.0,
            p2: 0.0,
            p_readout: 0.05,
        };
        let shots = 100_000;
        let r = sample(&QuantumState::zero(4), Basis::Z, shots, 3, Some(&noise)).unwrap();
        let tol = 3.0 * (0.05f64 * 0.95 / shots as f64).sqrt();
        for bit in 0..4 {
            let freq =
                r.outcomes.iter().filter(|&&o| o >> bit & 1 == 1).count() as f64 / shots as f64;
            assert!((freq - 0.05).abs() < tol, "bit {bit}: {freq}");
        }
    }

    #[test]
    fn sampling_rejects_bad_input() {
        let bad = QuantumState {
            n_qubits: 1,
            amplitudes: vec![Complex64::new(1.0, 0.0); 2],
        };
        assert!(matches!(
            sample(&bad, Basis::Z, 10, 0, None),
            Err(Error::NotNormalized { .. })
        ));
        assert!(sample(&QuantumState::zero(1), Basis::Z, 0, 0, None).is_err());
    }

    #[test]
    fn noiseless_trajectory_is_exact() {
        let circuit = vec![
            GateOp::Rzz {
                site_a: 0,
                site_b: 1,
                angle: 0.3,
            },
            GateOp::Rx {
                site: 0,
                angle: 0.9,
            },
            GateOp::Rx {
                site: 1,
                angle: -0.4,
            },
        ];
        let ideal = run_circuit(2, &circuit).unwrap();
        let traj = run_noisy_trajectory(2, &circuit, &NoiseSpec::noiseless(), 77).unwrap();
        assert_eq!(ideal, traj);
    }

    #[test]
    fn full_depolarizing_after_flip_matches_channel_average() {
        // Oracle: RX(π)|0⟩ = −i|1⟩, then X, Y or Z with probability 1/3 each.
        // X|1⟩ and Y|1⟩ have ⟨Z⟩ = +1, Z|1⟩ has ⟨Z⟩ = −1.
        let z_after = |m: [[f64; 2]; 2]| {
            let (a0, a1) = (m[0][1], m[1][1]);
            a0 * a0 - a1 * a1
        };
        let oracle = (z_after([[0.0, 1.0], [1.0, 0.0]])
            + z_after([[0.0, -1.0], [1.0, 0.0]])
            + z_after([[1.0, 0.0], [0.0, -1.0]]))
            / 3.0;
        assert!((oracle - 1.0 / 3.0).abs() < 1e-15);

        let noise = NoiseSpec {
            p1: 1.0,
            p2: 0.0,
            p_readout: 0.0,
        };
        let circuit = [GateOp::Rx { site: 0, angle: PI }];
        let trials = 100_000u64;
        let mut rng = rng_stream(5, 0);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..trials {
            let s = trajectory_with_rng(1, &circuit, &noise, &mut rng).unwrap();
            let z = s.expectation(PauliTerm::Z(0)).unwrap();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / trials as f64;
        let sigma = ((sum_sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        assert!(
            (mean - oracle).abs() < 3.0 * sigma,
            "mean {mean} sigma {sigma}"
        );
    }

    #[test]
    fn bitstring_round_trip() {
        assert_eq!(bitstring(0b0110, 4), "0110");
        assert_eq!(bitstring(0b0001, 4), "1000");
        assert_eq!(parse_bitstring("1000"), Some(1));
        assert_eq!(parse_bitstring("10x"), None);
    }
}
