// Probabilistic classification of a coarse surrogate, dumped as a grid.
//
// ```bash
// cargo run --release --example classification > grid.csv
// ```

use metais::classify::{prob_failure, prob_in_margin, write_grid_csv, MarginSpec};
use metais::kriging::{DesignOfExperiments, KrigingConfig, KrigingModel};
use metais::pipeline::initial_doe;
use metais::problem::Benchmark;

pub fn run_example<W: std::io::Write>(out: W, resolution: usize) -> metais::Result<()> {
    let ls = Benchmark::from_name("parabola2d", None)?.limit_state();
    let points = initial_doe(2, 12, 8.0, 5)?;
    let values = points
        .iter()
        .map(|u| ls.evaluate(u))
        .collect::<metais::Result<Vec<_>>>()?;
    let model = KrigingModel::fit(
        DesignOfExperiments::new(points, values)?,
        KrigingConfig::default(),
    )?;
    let spec = MarginSpec::default();

    let u = [0.1, 5.0];
    eprintln!(
        "at {u:?}: P[fail] = {:.3}, P[margin] = {:.3}",
        prob_failure(&model, &u)?,
        prob_in_margin(&model, &u, spec)?
    );
    write_grid_csv(&model, spec, -8.0, 8.0, resolution, out)
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example(std::io::stdout().lock(), 81)
}
