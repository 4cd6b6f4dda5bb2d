//! The whole staged workflow in one call, written to a run directory.
//!
//! ```text
//! cargo run --release --example full_pipeline [output_dir]
//! ```

use tfim::config::RunConfig;
use tfim::pipeline;

fn main() -> tfim::Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(dir) = std::env::args().nth(1) {
        cfg.set("output_dir", &dir)?;
    }
    let out = pipeline::pipeline(&cfg)?;
    println!("config hash {}", cfg.hash());
    print!(
        "{}",
        std::fs::read_to_string(cfg.output_dir.join(pipeline::SWEEP_FILE))?
    );
    println!();
    print!("{}", tfim::metrics::format_metrics_table(&out.metrics));
    for w in &out.warnings {
        println!("warning: {w}");
    }
    println!("files in {}", cfg.output_dir.display());
    Ok(())
}
