// Importance sampling with a Gaussian recentred on the design point.

use metais::estimate::{importance_sampling, EstimateResult, InstrumentalDensity};
use metais::problem::{standard_normal_log_density, Benchmark};
use metais::rng::fill_standard_normal;
use rand_chacha::ChaCha8Rng;

struct Shifted {
    center: Vec<f64>,
}

impl InstrumentalDensity for Shifted {
    fn dimension(&self) -> usize {
        self.center.len()
    }

    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        fill_standard_normal(rng, out);
        for (o, c) in out.iter_mut().zip(&self.center) {
            *o += c;
        }
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let shifted: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        standard_normal_log_density(&shifted)
    }
}

pub fn run_example() -> metais::Result<EstimateResult> {
    let bench = Benchmark::Linear {
        beta: 4.5,
        dimension: 2,
    };
    let ls = bench.limit_state();
    let h = Shifted {
        center: vec![4.5, 0.0],
    };
    let result = importance_sampling(&ls, &h, 5_000, 3)?;
    let exact = bench.reference().map(|r| r.pf).unwrap_or(f64::NAN);
    println!(
        "IS pf = {:.4e} (cov {:.3}) vs exact {exact:.4e} with {} g-calls",
        result.estimate,
        result.cov.unwrap_or(f64::NAN),
        result.n_model_evals
    );
    Ok(result)
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example().map(drop)
}
