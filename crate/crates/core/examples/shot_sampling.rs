//! Finite-shot estimates of the exact ground state at the critical field,
//! showing how the binomial error bars shrink with the shot count.
//!
//! ```text
//! cargo run --release --example shot_sampling
//! ```

use tfim::estimator::{run_batched_job, Backend, MeasurementPlan, Preparation};
use tfim::exact::{solve, OrderParameterVariant};
use tfim::statevector::QuantumState;
use tfim::SpinChainModel;

fn main() -> tfim::Result<()> {
    let template = SpinChainModel::new(4, 1.0, 0.0)?;
    let exact = solve(
        &template.with_field(1.0)?,
        OrderParameterVariant::ExcludeDiagonal,
    )?;
    let state = QuantumState::from_real(&exact.ground_vector)?;
    println!(
        "exact: E = {:.5}  <X> = {:.5}  <ZZ> = {:.5}",
        exact.energy,
        exact.x_mean(),
        exact.zz_mean()
    );

    for shots in [100, 1_000, 10_000, 100_000] {
        let mut plan = MeasurementPlan::new(4);
        plan.push_field(1.0, Preparation::State(state.clone()), shots);
        let r = &run_batched_job(&plan, &template, Backend::IdealSampled, None, 7, 4)?.results[0];
        println!(
            "{shots:>7} shots: E = {:.5} ± {:.5}  |M_z| = {:.4} ± {:.4}  <X> = {:.4}  <ZZ> = {:.4}",
            r.energy, r.energy_err, r.abs_mz, r.mz_err, r.x_mean, r.zz_mean
        );
    }
    Ok(())
}
