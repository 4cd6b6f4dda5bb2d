//! Depth-2 variational sweep with warm starts, compared against the exact
//! ground energy at each field value.
//!
//! ```text
//! cargo run --release --example vqe_sweep [per_gate|per_layer]
//! ```

use tfim::ansatz::{prepare_state, AnsatzSpec, ParameterMode};
use tfim::exact::{solve, OrderParameterVariant};
use tfim::vqe::{vqe_sweep, OptimizerConfig};
use tfim::{PauliTerm, SpinChainModel};

fn main() -> tfim::Result<()> {
    let mode = std::env::args()
        .nth(1)
        .and_then(|s| ParameterMode::parse(&s))
        .unwrap_or(ParameterMode::PerGate);
    let template = SpinChainModel::new(4, 1.0, 0.0)?;
    let spec = AnsatzSpec::new(4, 2, mode)?;
    let grid = [0.2, 0.6, 1.0, 1.4, 1.8];
    let results = vqe_sweep(&spec, &template, &grid, &OptimizerConfig::default(), 2024)?;

    println!(
        "mode = {}, {} parameters",
        mode.name(),
        spec.parameter_count()
    );
    for r in &results {
        let model = template.with_field(r.field)?;
        let exact = solve(&model, OrderParameterVariant::ExcludeDiagonal)?;
        let state = prepare_state(&spec, &r.parameters.values)?;
        let mz = (0..4)
            .map(|i| state.expectation(PauliTerm::Z(i)))
            .sum::<tfim::Result<f64>>()?
            / 4.0;
        println!(
            "h = {:.1}  E_vqe = {:.4}  E_exact = {:.4}  excess = {:.4}  |M_z| = {:.4}  evals = {}",
            r.field,
            r.energy,
            exact.energy,
            r.energy - exact.energy,
            mz.abs(),
            r.evaluations
        );
    }
    Ok(())
}
