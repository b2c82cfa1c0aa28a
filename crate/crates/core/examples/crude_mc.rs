// Crude Monte Carlo on the linear benchmark and its CoV law.
//
// ```bash
// cargo run --release --example crude_mc
// ```

use metais::estimate::{crude_mc, crude_mc_cov, EstimateResult};
use metais::normal;
use metais::problem::Benchmark;

pub fn run_example() -> metais::Result<EstimateResult> {
    let ls = Benchmark::Linear {
        beta: 3.0,
        dimension: 2,
    }
    .limit_state();
    let exact = normal::cdf(-3.0);
    let result = crude_mc(&ls, 200_000, 7)?;
    println!("exact   pf = {exact:.6e}");
    println!(
        "crude   pf = {:.6e} ± {:.1e}  ({} g-calls)",
        result.estimate,
        result.std_error(),
        ls.eval_count()
    );
    for n in [100, 10_000, 1_000_000] {
        println!("  CoV at N = {n:>9}: {:.3}", crude_mc_cov(exact, n));
    }
    Ok(result)
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example().map(drop)
}
