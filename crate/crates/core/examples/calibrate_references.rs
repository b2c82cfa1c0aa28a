//! Recomputes the frozen crude Monte-Carlo references of the catalog.
//!
//! ```bash
//! cargo run --release --example calibrate_references
//! ```

use metais::estimate::crude_mc;
use metais::problem::{
    Benchmark, PARABOLA_DEFAULT, PARABOLA_REFERENCE, QUAD20_REFERENCE, REFERENCE_SEED,
};

fn main() -> metais::Result<()> {
    for (bench, frozen) in [
        (PARABOLA_DEFAULT, PARABOLA_REFERENCE),
        (Benchmark::Quad20, QUAD20_REFERENCE),
    ] {
        let ls = bench.limit_state();
        let r = crude_mc(&ls, frozen.samples as usize, REFERENCE_SEED)?;
        println!(
            "{:<11} pf = {:?}  cov = {:?}  (frozen pf = {:?})",
            bench.name(),
            r.estimate,
            r.cov.unwrap_or(f64::NAN),
            frozen.pf
        );
    }
    Ok(())
}
