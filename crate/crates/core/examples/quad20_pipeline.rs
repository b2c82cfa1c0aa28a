//! The 20-dimensional stress problem through the whole pipeline, with
//! artifacts written to `./quad20-output`.
//!
//! ```bash
//! cargo run --release --example quad20_pipeline
//! ```

use std::path::Path;

use metais::pipeline::{run, RunConfig};
use metais::problem::QUAD20_REFERENCE;

fn main() -> metais::Result<()> {
    let config = RunConfig::preset("quad20", 5)?;
    let artifacts = run(&config)?;
    artifacts.write(Path::new("quad20-output"))?;
    let report = &artifacts.report;
    println!("{}", serde_json::to_string_pretty(&report.budgets)?);
    println!(
        "pf = {:.4e} (cov {:.3}), reference {:.4e}",
        report.result.pf,
        report.result.cov_combined.unwrap_or(f64::NAN),
        QUAD20_REFERENCE.pf
    );
    Ok(())
}
