// Slice sampling from an unnormalized bimodal density.

use metais::mcmc::{slice_sample, Chain, ChainConfig, UnnormalizedTarget};

pub fn run_example() -> metais::Result<Chain> {
    // equal mixture of N(-3, 1) and N(3, 1), unnormalized
    let target = UnnormalizedTarget::new(1, |x: &[f64]| {
        let a = -0.5 * (x[0] + 3.0).powi(2);
        let b = -0.5 * (x[0] - 3.0).powi(2);
        a.max(b) + (-(a - b).abs()).exp().ln_1p()
    });
    let mut config = ChainConfig::new(vec![0.0], 20_000, 42);
    config.step_width = vec![4.0];
    let chain = slice_sample(&target, &config)?;

    let n = chain.samples.len() as f64;
    let mean = chain.samples.iter().map(|x| x[0]).sum::<f64>() / n;
    let right = chain.samples.iter().filter(|x| x[0] > 0.0).count() as f64 / n;
    println!("mean = {mean:+.3}, right-mode share = {right:.3}");
    println!("{:?}", chain.diagnostics);
    Ok(chain)
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example().map(drop)
}
