//! Full meta-IS estimate on the parabola, compared with the frozen reference.
//!
//! ```bash
//! cargo run --release --example meta_is_parabola
//! ```

use metais::pipeline::{run, RunConfig};
use metais::problem::PARABOLA_REFERENCE;

fn main() -> metais::Result<()> {
    let config = RunConfig::preset("parabola2d", 2024)?;
    let artifacts = run(&config)?;
    let r = &artifacts.report.result;
    println!("pf_eps    = {:.4e}", r.pf_eps.estimate);
    println!("alpha_corr = {:.4}", r.alpha_corr.estimate);
    println!(
        "pf        = {:.4e}  (cov {:.2}%)",
        r.pf,
        100.0 * r.cov_combined.unwrap_or(f64::NAN)
    );
    println!(
        "reference = {:.4e}  (cov {:.2}%)",
        PARABOLA_REFERENCE.pf,
        100.0 * PARABOLA_REFERENCE.cov
    );
    println!("g-calls   = {}", artifacts.report.budgets.total_g_evals);
    Ok(())
}
