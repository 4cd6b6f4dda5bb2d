//! Exact ground-state observables of a four-spin chain across the field grid.
//!
//! ```text
//! cargo run --example exact_spectrum
//! ```

use tfim::exact::{exact_sweep, OrderParameterVariant};
use tfim::SpinChainModel;

fn main() -> tfim::Result<()> {
    let template = SpinChainModel::new(4, 1.0, 0.0)?;
    let grid = [0.0, 0.2, 0.6, 1.0, 1.4, 1.8, 3.0];
    let results = exact_sweep(&template, &grid, OrderParameterVariant::ExcludeDiagonal)?;
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8}",
        "h/J", "E0", "M_excl", "M_incl", "gap", "<X>", "<ZZ>"
    );
    for o in &results {
        println!(
            "{:>5.2} {:>9.4} {:>9.4} {:>9.4} {:>9.2e} {:>8.4} {:>8.4}",
            o.field,
            o.energy,
            o.order_parameter_exclude,
            o.order_parameter_include,
            o.degeneracy_gap,
            o.x_mean(),
            o.zz_mean()
        );
    }
    Ok(())
}
