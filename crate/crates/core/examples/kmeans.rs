// Condenses a point cloud into K representatives.

use metais::refine::kmeans;
use metais::rng::{fill_standard_normal, rng_from_seed};

pub fn run_example() -> metais::Result<Vec<Vec<f64>>> {
    let mut rng = rng_from_seed(9);
    let mut cloud = Vec::new();
    for center in [[-4.0, 0.0], [4.0, 0.0], [0.0, 5.0]] {
        for _ in 0..500 {
            let mut x = [0.0; 2];
            fill_standard_normal(&mut rng, &mut x);
            cloud.push(vec![center[0] + 0.5 * x[0], center[1] + 0.5 * x[1]]);
        }
    }
    let centers = kmeans(&cloud, 3, 1)?;
    for c in &centers {
        println!("({:+.3}, {:+.3})", c[0], c[1]);
    }
    Ok(centers)
}

#[allow(dead_code)]
fn main() -> metais::Result<()> {
    run_example().map(drop)
}
