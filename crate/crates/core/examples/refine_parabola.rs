// Adaptive refinement of the parabola surrogate until the budget is spent.

use metais::kriging::{DesignOfExperiments, KrigingConfig, KrigingModel};
use metais::pipeline::initial_doe;
use metais::problem::Benchmark;
use metais::refine::{refine_until_budget, RefinementConfig, RefinementTrace};

pub fn run_example() -> metais::Result<(KrigingModel, RefinementTrace)> {
    let ls = Benchmark::from_name("parabola2d", None)?.limit_state();
    let points = initial_doe(2, 12, 8.0, 1)?;
    let values = points
        .iter()
        .map(|u| ls.evaluate(u))
        .collect::<metais::Result<Vec<_>>>()?;
    let model = KrigingModel::fit(
        DesignOfExperiments::new(points, values)?,
        KrigingConfig::default(),
    )?;

    let config = RefinementConfig {
        budget: 60,
        seed: 17,
        ..RefinementConfig::default()
    };
    let (model, trace) = refine_until_budget(model, &ls, &config)?;
    println!("initial margin mass {:.4}", trace.initial_margin_mass);
    for r in &trace.records {
        println!(
            "iter {:>2}: m = {:>3}, margin mass = {:.4}",
            r.iteration, r.doe_size, r.margin_mass
        );
    }
    println!(
        "stop: {:?}, g-calls: {}",
        trace.stop_reason,
        ls.eval_count()
    );
    Ok((model, trace))
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example().map(drop)
}
