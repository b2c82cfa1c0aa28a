#![allow(dead_code)]

use metais::kriging::{DesignOfExperiments, KrigingConfig, KrigingModel};
use metais::rng::rng_from_seed;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Predictive mean and variance by explicit inversion of `R + τI`, written
/// straight from the moment formulas with none of the library's
/// factorizations.
pub fn dense_moments(model: &KrigingModel, x: &[f64]) -> (f64, f64) {
    let doe = model.doe();
    let pts = doe.points();
    let m = pts.len();
    let basis = model.config().basis;
    let p = basis.size(doe.dimension());
    let tau = model.nugget();
    let ell = model.lengths();
    let corr = |a: &[f64], b: &[f64]| -> f64 {
        let s: f64 = a
            .iter()
            .zip(b)
            .zip(ell)
            .map(|((u, v), l)| ((u - v) / l).powi(2))
            .sum();
        (-s).exp()
    };

    let r_mat = DMatrix::from_fn(m, m, |i, j| {
        corr(&pts[i], &pts[j]) + if i == j { tau } else { 0.0 }
    });
    let f_mat = DMatrix::from_fn(m, p, |i, j| basis.eval(&pts[i])[j]);
    let y = DVector::from_column_slice(doe.values());
    let r_inv = r_mat
        .try_inverse()
        .expect("correlation matrix is invertible");

    let ftrf = f_mat.transpose() * &r_inv * &f_mat;
    let ftrf_inv = ftrf.try_inverse().expect("identifiable basis");
    let beta = &ftrf_inv * f_mat.transpose() * &r_inv * &y;
    let resid = &y - &f_mat * &beta;
    let sigma2 = (resid.transpose() * &r_inv * &resid)[(0, 0)] / m as f64;

    let r = DVector::from_fn(m, |i, _| {
        corr(x, &pts[i]) + if pts[i] == x { tau } else { 0.0 }
    });
    let f = DVector::from_vec(basis.eval(x));
    let mean = (f.transpose() * &beta)[(0, 0)] + (r.transpose() * &r_inv * &resid)[(0, 0)];
    let u = f_mat.transpose() * &r_inv * &r - &f;
    let var = sigma2
        * (1.0 - (r.transpose() * &r_inv * &r)[(0, 0)] + (u.transpose() * &ftrf_inv * &u)[(0, 0)]);
    (mean, var.max(0.0))
}

pub fn random_points(n: usize, m: usize, half_width: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(-half_width..half_width))
                .collect()
        })
        .collect()
}

pub fn smooth_response(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, v)| (1.0 + 0.3 * k as f64) * v.sin() + 0.2 * v * v)
        .sum::<f64>()
        + 1.5
}

pub fn fitted(n: usize, m: usize, seed: u64, config: KrigingConfig) -> KrigingModel {
    let pts = random_points(n, m, 2.0, seed);
    let ys = pts.iter().map(|x| smooth_response(x)).collect();
    KrigingModel::fit(DesignOfExperiments::new(pts, ys).unwrap(), config).unwrap()
}

/// `|a - b| <= tol · |b|`, with an absolute floor for values near zero.
pub fn rel_close(a: f64, b: f64, tol: f64, floor: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(floor)
}

/// 2-norm condition number of `R + τI`.
pub fn correlation_condition(model: &KrigingModel) -> f64 {
    let pts = model.doe().points();
    let ell = model.lengths();
    let m = pts.len();
    let r = DMatrix::from_fn(m, m, |i, j| {
        let s: f64 = pts[i]
            .iter()
            .zip(&pts[j])
            .zip(ell)
            .map(|((u, v), l)| ((u - v) / l).powi(2))
            .sum();
        (-s).exp() + if i == j { model.nugget() } else { 0.0 }
    });
    let sv = r.singular_values();
    sv.max() / sv.min()
}

/// Parabola model fitted on the 12-point sphere-uniform DOE of `seed`.
pub fn parabola_start(seed: u64) -> (metais::problem::LimitState, KrigingModel) {
    let ls = metais::problem::Benchmark::from_name("parabola2d", None)
        .unwrap()
        .limit_state();
    let pts = metais::pipeline::initial_doe(2, 12, 8.0, seed).unwrap();
    let ys = pts.iter().map(|u| ls.evaluate(u).unwrap()).collect();
    let model = KrigingModel::fit(
        DesignOfExperiments::new(pts, ys).unwrap(),
        KrigingConfig::default(),
    )
    .unwrap();
    (ls, model)
}
