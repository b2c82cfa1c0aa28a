//! Box-constrained Nelder–Mead used for the length-scale search.
//!
//! Trial points are projected onto the box, so the simplex can collapse onto
//! a face; that is fine for a likelihood surface, where the optimum often
//! sits on a bound.

pub(crate) struct BoxedNelderMead<'a> {
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub initial_step: f64,
    pub max_evaluations: usize,
    pub tolerance: f64,
}

impl BoxedNelderMead<'_> {
    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(self.lower).zip(self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Minimizes `objective` from `start`, returning the best vertex and its
    /// value. Non-finite objective values are treated as `+∞`.
    pub fn minimize<F>(&self, start: &[f64], mut objective: F) -> (Vec<f64>, f64)
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = start.len();
        let mut evaluations = 0;
        let mut eval = |x: &[f64], count: &mut usize| {
            *count += 1;
            let v = objective(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };

        let mut x0 = start.to_vec();
        self.project(&mut x0);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let f0 = eval(&x0, &mut evaluations);
        simplex.push((x0.clone(), f0));
        for k in 0..n {
            let mut x = x0.clone();
            let width = self.upper[k] - self.lower[k];
            let step = self.initial_step * width;
            // step away from the nearer bound
            x[k] += if x[k] + step <= self.upper[k] {
                step
            } else {
                -step
            };
            self.project(&mut x);
            let f = eval(&x, &mut evaluations);
            simplex.push((x, f));
        }

        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        while evaluations < self.max_evaluations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            if (worst - best).abs() <= self.tolerance * (1.0 + best.abs()) {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n as f64;
                }
            }
            let towards = |coef: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + coef * (c - w))
                    .collect()
            };

            let mut reflected = towards(alpha);
            self.project(&mut reflected);
            let fr = eval(&reflected, &mut evaluations);
            if fr < simplex[0].1 {
                let mut expanded = towards(gamma);
                self.project(&mut expanded);
                let fe = eval(&expanded, &mut evaluations);
                simplex[n] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (mut contracted, outside) = if fr < simplex[n].1 {
                (towards(rho * alpha), true)
            } else {
                (towards(-rho), false)
            };
            self.project(&mut contracted);
            let fc = eval(&contracted, &mut evaluations);
            if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
                simplex[n] = (contracted, fc);
                continue;
            }
            // shrink towards the best vertex
            let best_x = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                for (v, b) in vertex.0.iter_mut().zip(&best_x) {
                    *v = b + sigma * (*v - b);
                }
                vertex.1 = eval(&vertex.0, &mut evaluations);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        simplex.swap_remove(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let nm = BoxedNelderMead {
            lower: &[-5.0, -5.0],
            upper: &[5.0, 5.0],
            initial_step: 0.1,
            max_evaluations: 2000,
            tolerance: 1e-14,
        };
        let (point, value) = nm.minimize(&[3.0, -4.0], |x| {
            (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 0.5).powi(2)
        });
        assert!((point[0] - 1.0).abs() < 1e-4);
        assert!((point[1] + 0.5).abs() < 1e-4);
        assert!(value < 1e-8);
    }

    #[test]
    fn respects_bounds() {
        let nm = BoxedNelderMead {
            lower: &[0.0],
            upper: &[1.0],
            initial_step: 0.2,
            max_evaluations: 500,
            tolerance: 1e-12,
        };
        let (point, _) = nm.minimize(&[0.5], |x| -x[0]);
        assert!((point[0] - 1.0).abs() < 1e-9);
    }
}
