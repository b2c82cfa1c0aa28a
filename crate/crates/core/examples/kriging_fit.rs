// Fits a kriging surrogate of the parabola from a small DOE.

use metais::kriging::{DesignOfExperiments, KrigingConfig, KrigingModel};
use metais::pipeline::initial_doe;
use metais::problem::Benchmark;

pub fn run_example() -> metais::Result<KrigingModel> {
    let ls = Benchmark::from_name("parabola2d", None)?.limit_state();
    let points = initial_doe(2, 20, 8.0, 11)?;
    let values = points
        .iter()
        .map(|u| ls.evaluate(u))
        .collect::<metais::Result<Vec<_>>>()?;
    let model = KrigingModel::fit(
        DesignOfExperiments::new(points, values)?,
        KrigingConfig::default(),
    )?;

    println!("lengths  = {:?}", model.lengths());
    println!("sigma2_G = {:.4}", model.process_variance());
    println!("beta     = {:?}", model.coefficients());
    println!("nugget   = {:e}", model.nugget());
    for u in [[0.0, 0.0], [0.1, 5.0], [3.0, 2.0]] {
        let p = model.predict(&u)?;
        println!(
            "u = {u:?}: mu = {:+.4}, sigma = {:.2e}, g = {:+.4}",
            p.mean,
            p.std,
            ls.evaluate(&u)?
        );
    }
    Ok(model)
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example().map(drop)
}
