use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

const MAX_LLOYD_ITERATIONS: usize = 100;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(j, c)| (j, sq_dist(point, c)))
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

/// k-means++ seeding followed by Lloyd iterations until the assignment no
/// longer changes (at most 100 iterations). A cluster that empties out is
/// reseeded at the point farthest from all current centers.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(Error::input("refine", "k-means needs K >= 1"));
    }
    if points.len() < k {
        return Err(Error::input(
            "refine",
            format!(
                "k-means needs at least K = {k} points, got {}",
                points.len()
            ),
        ));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::input(
            "refine",
            "k-means points have mixed dimensions",
        ));
    }

    let mut rng = rng_from_seed(seed);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..points.len())].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = d2.iter().rposition(|d| *d > 0.0).unwrap_or(0);
            for (i, d) in d2.iter().enumerate() {
                if *d > 0.0 && target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..points.len())
        };
        centers.push(points[pick].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }

    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(points) {
            let (j, _) = nearest(p, &centers);
            if *a != j {
                *a = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (a, p) in assignment.iter().zip(points) {
            counts[*a] += 1;
            for (s, v) in sums[*a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, nearest(p, &centers).1))
                    .fold(
                        (0, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    )
                    .0;
                centers[j] = points[far].clone();
            }
        }
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::fill_standard_normal;

    #[test]
    fn singleton_clusters_return_the_points() {
        let pts = vec![
            vec![0.0, 1.0],
            vec![2.0, -1.0],
            vec![5.0, 5.0],
            vec![-3.0, 0.5],
        ];
        let mut centers = kmeans(&pts, 4, 17).unwrap();
        centers.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut expected = pts.clone();
        expected.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(centers, expected);
    }

    #[test]
    fn separates_two_blobs() {
        let mut rng = rng_from_seed(5);
        let mut pts = Vec::new();
        let mut means = [[0.0; 2]; 2];
        for (b, cx) in [-10.0, 10.0].iter().enumerate() {
            for _ in 0..200 {
                let mut z = [0.0; 2];
                fill_standard_normal(&mut rng, &mut z);
                let p = vec![cx + 0.1 * z[0], 0.1 * z[1]];
                means[b][0] += p[0] / 200.0;
                means[b][1] += p[1] / 200.0;
                pts.push(p);
            }
        }
        let mut centers = kmeans(&pts, 2, 3).unwrap();
        centers.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for (c, m) in centers.iter().zip(&means) {
            assert!((c[0] - m[0]).abs() < 1e-12 && (c[1] - m[1]).abs() < 1e-12);
        }
        assert!((centers[0][0] + 10.0).abs() < 0.2 && (centers[1][0] - 10.0).abs() < 0.2);
    }

    #[test]
    fn identical_points_repair_empty_cluster() {
        let pts = vec![vec![1.5, -2.0]; 6];
        let centers = kmeans(&pts, 2, 1).unwrap();
        assert_eq!(centers, vec![vec![1.5, -2.0]; 2]);
    }

    #[test]
    fn too_few_points() {
        assert!(kmeans(&[vec![0.0]], 2, 1).is_err());
        assert!(kmeans(&[vec![0.0]], 0, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let mut rng = rng_from_seed(8);
        let pts: Vec<Vec<f64>> = (0..300)
            .map(|_| {
                let mut z = vec![0.0; 3];
                fill_standard_normal(&mut rng, &mut z);
                z
            })
            .collect();
        assert_eq!(kmeans(&pts, 7, 4).unwrap(), kmeans(&pts, 7, 4).unwrap());
    }
}
