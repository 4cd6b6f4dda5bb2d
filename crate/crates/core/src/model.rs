//! Transverse-field Ising chain with open boundaries and the Pauli operators
//! needed to build and measure it.
//!
//! Bit convention: spin `i` lives in bit `i` of a basis-state index (site 0 is
//! the least significant bit) and bit value 0 is the `Z = +1` eigenstate.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest chain that is still represented densely.
pub const MAX_SPINS: usize = 12;

/// Tolerance on `⟨ψ|ψ⟩ − 1` accepted by [`expectation`].
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Open-boundary transverse-field Ising chain
/// `H = −J Σ Z_i Z_{i+1} − h Σ X_i`.
///
/// There is no periodic variant: the wraparound bond does not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainModel {
    n_spins: usize,
    coupling: f64,
    field: f64,
}

impl SpinChainModel {
    pub fn new(n_spins: usize, coupling: f64, field: f64) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::InvalidModel(format!(
                "need at least 2 spins, got {n_spins}"
            )));
        }
        if n_spins > MAX_SPINS {
            return Err(Error::InvalidModel(format!(
                "{n_spins} spins exceeds the dense limit of {MAX_SPINS}"
            )));
        }
        if !coupling.is_finite() || !field.is_finite() {
            return Err(Error::InvalidModel(
                "coupling and field must be finite".into(),
            ));
        }
        Ok(Self {
            n_spins,
            coupling,
            field,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_spins
    }

    /// Same chain and coupling at a different transverse field.
    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.n_spins, self.coupling, field)
    }

    /// Nearest-neighbour bonds `(i, i+1)` in ascending order.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..self.n_spins - 1).map(|i| (i, i + 1))
    }
}

/// Single Pauli term appearing in the chain Hamiltonian or its observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliTerm {
    Z(usize),
    X(usize),
    ZZ(usize, usize),
}

impl PauliTerm {
    pub fn sites(&self) -> Vec<usize> {
        match *self {
            PauliTerm::Z(i) | PauliTerm::X(i) => vec![i],
            PauliTerm::ZZ(a, b) => vec![a, b],
        }
    }

    /// Checks site ranges and distinctness against an `n_spins` chain.
    pub fn validate(&self, n_spins: usize) -> Result<()> {
        for site in self.sites() {
            if site >= n_spins {
                return Err(Error::SiteOutOfRange { site, n_spins });
            }
        }
        if let PauliTerm::ZZ(a, b) = *self {
            if a == b {
                return Err(Error::InvalidTerm(format!("Z{a}Z{b} repeats a site")));
            }
        }
        Ok(())
    }

    /// True when the term is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        !matches!(self, PauliTerm::X(_))
    }

    /// Eigenvalue of a diagonal term on a basis state; `None` for X terms.
    pub fn diagonal_value(&self, basis_state: usize) -> Option<f64> {
        let sign = |site: usize| {
            if basis_state >> site & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        match *self {
            PauliTerm::Z(i) => Some(sign(i)),
            PauliTerm::ZZ(a, b) => Some(sign(a) * sign(b)),
            PauliTerm::X(_) => None,
        }
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PauliTerm::Z(i) => write!(f, "Z{i}"),
            PauliTerm::X(i) => write!(f, "X{i}"),
            PauliTerm::ZZ(a, b) => write!(f, "Z{a}Z{b}"),
        }
    }
}

/// Dense real symmetric operator in the computational basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dimension: usize,
    entries: Vec<f64>,
}

impl DenseOperator {
    pub fn zeros(dimension: usize) -> Self {
        Self {
            dimension,
            entries: vec![0.0; dimension * dimension],
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut op = Self::zeros(values.len());
        for (k, &v) in values.iter().enumerate() {
            op.entries[k * values.len() + k] = v;
        }
        op
    }

    /// Builds an operator from row-major entries, rejecting anything not
    /// exactly symmetric.
    pub fn from_row_major(dimension: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dimension * dimension {
            return Err(Error::Dimension {
                expected: dimension * dimension,
                got: entries.len(),
            });
        }
        let op = Self { dimension, entries };
        if !op.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(op)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dimension + col]
    }

    /// Adds `value` to both `(r, c)` and `(c, r)` (once on the diagonal).
    fn add_symmetric(&mut self, r: usize, c: usize, value: f64) {
        self.entries[r * self.dimension + c] += value;
        if r != c {
            self.entries[c * self.dimension + r] += value;
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dimension;
        (0..d).all(|r| (r + 1..d).all(|c| self.entries[r * d + c] == self.entries[c * d + r]))
    }

    /// `self + scale · other`.
    pub fn add_scaled(&mut self, other: &DenseOperator, scale: f64) -> Result<()> {
        if other.dimension != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += scale * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &DenseOperator) -> Vec<f64> {
        let d = self.dimension;
        let mut out = vec![0.0; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..d {
                    out[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        out
    }

    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dimension;
        (0..d)
            .map(|r| (0..d).map(|c| self.entries[r * d + c] * v[c]).sum())
            .collect()
    }
}

/// Matrix of a single Pauli term on `n_spins` sites.
pub fn term_matrix(term: PauliTerm, n_spins: usize) -> Result<DenseOperator> {
    if n_spins == 0 || n_spins > MAX_SPINS {
        return Err(Error::InvalidModel(format!(
            "{n_spins} spins outside 1..={MAX_SPINS}"
        )));
    }
    term.validate(n_spins)?;
    let dim = 1usize << n_spins;
    let mut op = DenseOperator::zeros(dim);
    match term {
        PauliTerm::X(i) => {
            for b in 0..dim {
                let flipped = b ^ (1 << i);
                if flipped > b {
                    op.add_symmetric(b, flipped, 1.0);
                }
            }
        }
        diag => {
            for b in 0..dim {
                op.add_symmetric(b, b, diag.diagonal_value(b).unwrap_or_default());
            }
        }
    }
    Ok(op)
}

/// Dense Hamiltonian `−J Σ_i Z_i Z_{i+1} − h Σ_i X_i` with open boundaries.
pub fn build_hamiltonian(model: &SpinChainModel) -> DenseOperator {
    let n = model.n_spins();
    let dim = model.dimension();
    let mut op = DenseOperator::zeros(dim);
    for b in 0..dim {
        let bond_sum: f64 = model
            .bonds()
            .map(|(i, j)| PauliTerm::ZZ(i, j).diagonal_value(b).unwrap_or_default())
            .sum();
        op.add_symmetric(b, b, -model.coupling() * bond_sum);
        for i in 0..n {
            let flipped = b ^ (1 << i);
            if flipped > b {
                op.add_symmetric(b, flipped, -model.field());
            }
        }
    }
    op
}

/// Anything whose expectation on a complex state can be taken.
pub enum Observable<'a> {
    Dense(&'a DenseOperator),
    Term(PauliTerm),
}

impl<'a> From<&'a DenseOperator> for Observable<'a> {
    fn from(op: &'a DenseOperator) -> Self {
        Observable::Dense(op)
    }
}

impl From<PauliTerm> for Observable<'_> {
    fn from(term: PauliTerm) -> Self {
        Observable::Term(term)
    }
}

/// `⟨ψ|O|ψ⟩` for a normalized amplitude vector.
pub fn expectation<'a>(op: impl Into<Observable<'a>>, amplitudes: &[Complex64]) -> Result<f64> {
    let dim = amplitudes.len();
    if !dim.is_power_of_two() {
        return Err(Error::Dimension {
            expected: dim.next_power_of_two(),
            got: dim,
        });
    }
    let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    match op.into() {
        Observable::Dense(op) => {
            if op.dimension() != dim {
                return Err(Error::Dimension {
                    expected: op.dimension(),
                    got: dim,
                });
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                let mut row = Complex64::new(0.0, 0.0);
                for c in 0..dim {
                    let o = op.get(r, c);
                    if o != 0.0 {
                        row += amplitudes[c] * o;
                    }
                }
                acc += amplitudes[r].conj() * row;
            }
            if acc.im.abs() > NORM_TOLERANCE {
                return Err(Error::ImaginaryResidue(acc.im));
            }
            Ok(acc.re)
        }
        Observable::Term(term) => {
            let n_spins = dim.trailing_zeros() as usize;
            term.validate(n_spins)?;
            Ok(term_expectation_unchecked(term, amplitudes))
        }
    }
}

/// Bitwise expectation of a Pauli term; the caller guarantees sizes.
pub(crate) fn term_expectation_unchecked(term: PauliTerm, amplitudes: &[Complex64]) -> f64 {
    match term {
        PauliTerm::X(i) => {
            let mask = 1usize << i;
            // Re Σ_b conj(a_b) a_{b⊕mask}; the sum is real since X is Hermitian.
            amplitudes
                .iter()
                .enumerate()
                .map(|(b, a)| (a.conj() * amplitudes[b ^ mask]).re)
                .sum()
        }
        diag => amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| a.norm_sqr() * diag.diagonal_value(b).unwrap_or_default())
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force Kronecker-product construction over {I, X, Z}; site 0 is the
    /// rightmost factor so that it maps to the least significant bit.
    fn kron_oracle(factors: &[[[f64; 2]; 2]]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![1.0]];
        for f in factors.iter().rev() {
            let d = m.len();
            let mut next = vec![vec![0.0; 2 * d]; 2 * d];
            for r in 0..d {
                for c in 0..d {
                    for (fr, row) in f.iter().enumerate() {
                        for (fc, v) in row.iter().enumerate() {
                            next[r * 2 + fr][c * 2 + fc] = m[r][c] * v;
                        }
                    }
                }
            }
            m = next;
        }
        m
    }

    const I2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];
    const X2: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
    const Z2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

    // kron_oracle lists site 0 first but builds it into the *last* Kronecker
    // slot, i.e. the least significant bit.
    fn oracle_hamiltonian(n: usize, j: f64, h: f64) -> Vec<Vec<f64>> {
        let dim = 1 << n;
        let mut total = vec![vec![0.0; dim]; dim];
        let mut add = |m: Vec<Vec<f64>>, s: f64| {
            for r in 0..dim {
                for c in 0..dim {
                    total[r][c] += s * m[r][c];
                }
            }
        };
        for i in 0..n - 1 {
            let mut f = vec![I2; n];
            f[i] = Z2;
            f[i + 1] = Z2;
            add(kron_oracle(&f), -j);
        }
        for i in 0..n {
            let mut f = vec![I2; n];
            f[i] = X2;
            add(kron_oracle(&f), -h);
        }
        total
    }

    #[test]
    fn two_spin_classical_chain_is_diagonal() {
        let h = build_hamiltonian(&SpinChainModel::new(2, 1.0, 0.0).unwrap());
        assert_eq!(h, DenseOperator::diagonal(&[-1.0, 1.0, 1.0, -1.0]));
    }

    #[test]
    fn hamiltonian_matches_kronecker_oracle() {
        for (n, h) in [(2, 0.3), (3, 0.7), (4, 1.0), (4, 1.8)] {
            let op = build_hamiltonian(&SpinChainModel::new(n, 1.0, h).unwrap());
            let oracle = oracle_hamiltonian(n, 1.0, h);
            for r in 0..1 << n {
                for c in 0..1 << n {
                    assert!(
                        (op.get(r, c) - oracle[r][c]).abs() < 1e-15,
                        "n={n} ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn single_site_term_matrices() {
        assert_eq!(
            term_matrix(PauliTerm::Z(0), 1).unwrap(),
            DenseOperator::diagonal(&[1.0, -1.0])
        );
        let x = term_matrix(PauliTerm::X(0), 1).unwrap();
        assert_eq!(x.entries(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn z0z2_diagonal_matches_enumeration() {
        let m = term_matrix(PauliTerm::ZZ(0, 2), 3).unwrap();
        for b in 0..8usize {
            let expected = (-1f64).powi((b & 1) as i32) * (-1f64).powi((b >> 2 & 1) as i32);
            assert_eq!(m.get(b, b), expected);
        }
        let mut f = vec![I2; 3];
        f[0] = Z2;
        f[2] = Z2;
        let oracle = kron_oracle(&f);
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(m.get(r, c), oracle[r][c]);
            }
        }
    }

    #[test]
    fn term_errors() {
        assert!(matches!(
            term_matrix(PauliTerm::X(3), 3),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            term_matrix(PauliTerm::ZZ(1, 1), 3),
            Err(Error::InvalidTerm(_))
        ));
    }

    #[test]
    fn model_validation() {
        assert!(SpinChainModel::new(1, 1.0, 0.0).is_err());
        assert!(SpinChainModel::new(13, 1.0, 0.0).is_err());
        assert!(SpinChainModel::new(4, 1.0, f64::NAN).is_err());
        assert!(SpinChainModel::new(12, 1.0, 0.5).is_ok());
    }

    #[test]
    fn basic_expectations() {
        let mut zero = vec![Complex64::new(0.0, 0.0); 16];
        zero[0] = Complex64::new(1.0, 0.0);
        assert_eq!(expectation(PauliTerm::Z(0), &zero).unwrap(), 1.0);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut plus = vec![Complex64::new(0.0, 0.0); 16];
        plus[0] = Complex64::new(s, 0.0);
        plus[1] = Complex64::new(s, 0.0);
        assert!((expectation(PauliTerm::X(0), &plus).unwrap() - 1.0).abs() < 1e-15);
        let x0 = term_matrix(PauliTerm::X(0), 4).unwrap();
        assert!((expectation(&x0, &plus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_rejects_bad_states() {
        let op = DenseOperator::diagonal(&[1.0, -1.0]);
        let unnormalized = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(
            expectation(&op, &unnormalized),
            Err(Error::NotNormalized { .. })
        ));
        let wrong = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        assert!(matches!(
            expectation(&op, &wrong),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn non_symmetric_input_rejected() {
        assert!(matches!(
            DenseOperator::from_row_major(2, vec![0.0, 1.0, 2.0, 0.0]),
            Err(Error::NotSymmetric)
        ));
    }
}
