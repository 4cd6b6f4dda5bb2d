//! Optimized depth-2 circuits executed on the ideal and the noisy backend
//! with the same seed, plus a sweep over the two-qubit error rate.
//!
//! ```text
//! cargo run --release --example noisy_emulation
//! ```

use tfim::ansatz::{build_circuit, AnsatzSpec, ParameterMode};
use tfim::estimator::{run_batched_job, Backend, MeasurementPlan, Preparation};
use tfim::statevector::NoiseSpec;
use tfim::vqe::{vqe_sweep, OptimizerConfig};
use tfim::SpinChainModel;

fn main() -> tfim::Result<()> {
    let template = SpinChainModel::new(4, 1.0, 0.0)?;
    let spec = AnsatzSpec::new(4, 2, ParameterMode::PerGate)?;
    let grid = [0.2, 1.0, 1.8];
    let optimized = vqe_sweep(&spec, &template, &grid, &OptimizerConfig::default(), 1)?;

    let mut plan = MeasurementPlan::new(4);
    for r in &optimized {
        plan.push_field(
            r.field,
            Preparation::Circuit(build_circuit(&spec, &r.parameters.values)?),
            8192,
        );
    }
    let ideal = run_batched_job(&plan, &template, Backend::IdealSampled, None, 11, 4)?;
    let noisy = run_batched_job(
        &plan,
        &template,
        Backend::Noisy,
        Some(&NoiseSpec::default()),
        11,
        4,
    )?;
    for (i, n) in ideal.results.iter().zip(&noisy.results) {
        println!(
            "h = {:.1}  E ideal {:.4} noisy {:.4}   |M_z| ideal {:.4} noisy {:.4}   <ZZ> ideal {:.4} noisy {:.4}",
            i.field, i.energy, n.energy, i.abs_mz, n.abs_mz, i.zz_mean, n.zz_mean
        );
    }

    println!("\np2 sweep at h = 1.0:");
    let mut single = MeasurementPlan::new(4);
    single.push_field(
        1.0,
        Preparation::Circuit(build_circuit(&spec, &optimized[1].parameters.values)?),
        8192,
    );
    for p2 in [0.0, 0.01, 0.02, 0.05, 0.1] {
        let noise = NoiseSpec {
            p2,
            ..NoiseSpec::default()
        };
        let r =
            &run_batched_job(&single, &template, Backend::Noisy, Some(&noise), 11, 4)?.results[0];
        println!(
            "  p2 = {p2:<5} E = {:.4} ± {:.4}  |M_z| = {:.4}",
            r.energy, r.energy_err, r.abs_mz
        );
    }
    Ok(())
}
