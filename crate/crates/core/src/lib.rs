//! Transverse-field Ising chain benchmarking: exact diagonalization, a
//! layered variational ansatz optimized on a noiseless statevector, and
//! shot-sampled execution (ideal or with stochastic Pauli noise), compared
//! through MAE/RMSE error tables.
//!
//! Conventions used throughout: site `i` is bit `i` of a basis-state index and
//! bit value 0 is `Z = +1`; the chain has open boundaries.

pub mod ansatz;
pub mod config;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod pipeline;
pub mod statevector;
pub mod vqe;

pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, expectation, term_matrix, DenseOperator, PauliTerm, SpinChainModel,
};
