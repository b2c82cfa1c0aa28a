use super::*;
use crate::rng::{fill_standard_normal, rng_from_seed};
use rand::Rng;

fn doe_1d(xs: &[f64], ys: &[f64]) -> DesignOfExperiments {
    DesignOfExperiments::new(xs.iter().map(|x| vec![*x]).collect(), ys.to_vec()).unwrap()
}

#[test]
fn correlation_examples() {
    assert_eq!(correlation(&[0.0, 0.0], &[0.3, 2.0]).unwrap(), 1.0);
    assert!((correlation(&[0.7], &[0.7]).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
    assert!((correlation(&[0.5, 3.0], &[0.5, 3.0]).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
    assert!(matches!(
        correlation(&[1.0], &[0.0]),
        Err(Error::Config { .. })
    ));
    assert!(correlation(&[1.0], &[-1.0]).is_err());
}

#[test]
fn constant_observations_give_zero_variance() {
    let doe = doe_1d(&[-1.0, 0.0, 1.0, 2.5], &[3.0; 4]);
    let fit = fit_given_lengths(&doe, RegressionBasis::Constant, &[1.0]).unwrap();
    assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
    assert!(fit.process_variance < 1e-24);

    let model = KrigingModel::fit(doe, KrigingConfig::default()).unwrap();
    assert!(model.process_variance() < 1e-24);
    for x in [-3.0, 0.4, 10.0] {
        assert!((model.predict(&[x]).unwrap().mean - 3.0).abs() < 1e-10);
    }
}

#[test]
fn exact_linear_trend_is_recovered() {
    // y = F b0 with the linear basis
    let b0 = [0.5, -2.0, 1.25];
    let pts: Vec<Vec<f64>> = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.2],
        vec![-0.4, 1.1],
        vec![2.0, -1.0],
        vec![0.7, 0.7],
    ];
    let ys: Vec<f64> = pts
        .iter()
        .map(|p| b0[0] + b0[1] * p[0] + b0[2] * p[1])
        .collect();
    let doe = DesignOfExperiments::new(pts, ys).unwrap();
    let fit = fit_given_lengths(&doe, RegressionBasis::Linear, &[0.8, 1.3]).unwrap();
    for (b, e) in fit.coefficients.iter().zip(b0) {
        assert!((b - e).abs() < 1e-9, "{b} vs {e}");
    }
    assert!(fit.process_variance < 1e-18);
}

#[test]
fn too_large_basis_is_not_identifiable() {
    let doe = DesignOfExperiments::new(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![1.0, 2.0, 3.0],
    )
    .unwrap();
    assert!(matches!(
        fit_given_lengths(&doe, RegressionBasis::Linear, &[1.0, 1.0]),
        Err(Error::Identifiability { p: 3, m: 3 })
    ));
}

#[test]
fn collapsed_bounds_return_that_length() {
    let doe = doe_1d(&[-1.0, 0.0, 1.0, 1.7], &[1.0, 0.0, 1.0, 2.0]);
    let config = KrigingConfig {
        length_bounds: Some(vec![[0.6, 0.6]]),
        ..KrigingConfig::default()
    };
    let model = KrigingModel::fit(doe, config).unwrap();
    assert!((model.lengths()[0] - 0.6).abs() < 1e-12);
}

#[test]
fn invalid_bounds_are_rejected() {
    let doe = doe_1d(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]);
    let config = KrigingConfig {
        length_bounds: Some(vec![[2.0, 1.0]]),
        ..KrigingConfig::default()
    };
    assert!(matches!(
        KrigingModel::fit(doe, config),
        Err(Error::Config { .. })
    ));
}

fn random_doe(n: usize, m: usize, seed: u64) -> DesignOfExperiments {
    let mut rng = rng_from_seed(seed);
    let pts: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let ys = pts
        .iter()
        .map(|p| p.iter().map(|v| v.sin() + 0.3 * v * v).sum::<f64>() - 1.0)
        .collect();
    DesignOfExperiments::new(pts, ys).unwrap()
}

#[test]
fn interpolates_design_points() {
    let model = KrigingModel::fit(random_doe(2, 25, 11), KrigingConfig::default()).unwrap();
    let sigma_g = model.process_std();
    for (x, y) in model.doe().points().iter().zip(model.doe().values()) {
        let pred = model.predict(x).unwrap();
        assert!((pred.mean - y).abs() <= 1e-8 * (1.0 + y.abs()));
        assert!(pred.std <= 1e-6 * sigma_g);
    }
}

#[test]
fn likelihood_beats_random_probes() {
    let doe = random_doe(2, 20, 5);
    let model = KrigingModel::fit(doe.clone(), KrigingConfig::default()).unwrap();
    let ranges = doe.ranges();
    let mut rng = rng_from_seed(99);
    for _ in 0..10 {
        let lengths: Vec<f64> = ranges
            .iter()
            .map(|r| {
                let (lo, hi) = ((1e-2 * r).ln(), (10.0 * r).ln());
                rng.random_range(lo..hi).exp()
            })
            .collect();
        if let Ok(fit) = fit_given_lengths(&doe, RegressionBasis::Constant, &lengths) {
            assert!(model.neg_log_likelihood() <= fit.neg_log_likelihood + 1e-9);
        }
    }
}

#[test]
fn add_points_bookkeeping() {
    let model = KrigingModel::fit(random_doe(2, 12, 3), KrigingConfig::default()).unwrap();

    let same = model.add_points(vec![], vec![]).unwrap();
    assert_eq!(same.model.doe(), model.doe());
    assert_eq!(same.model.lengths(), model.lengths());

    let dup = model.doe().points()[0].clone();
    let dropped = model.add_points(vec![dup], vec![0.0]).unwrap();
    assert_eq!(dropped.dropped, vec![0]);
    assert_eq!(dropped.model.doe().len(), 12);

    let far = vec![6.0, -6.0];
    let grown = model.add_points(vec![far.clone()], vec![2.5]).unwrap();
    assert_eq!(grown.model.doe().len(), 13);
    let pred = grown.model.predict(&far).unwrap();
    assert!((pred.mean - 2.5).abs() < 1e-8 * 3.5);
}

#[test]
fn refit_is_deterministic() {
    let a = KrigingModel::fit(random_doe(3, 20, 8), KrigingConfig::default()).unwrap();
    let b = KrigingModel::fit(random_doe(3, 20, 8), KrigingConfig::default()).unwrap();
    assert_eq!(a.lengths(), b.lengths());
    let x = [0.1, 0.2, -0.3];
    assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
}

#[test]
fn predict_checks_dimension() {
    let model = KrigingModel::fit(random_doe(2, 8, 1), KrigingConfig::default()).unwrap();
    assert!(matches!(
        model.predict(&[0.0]),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(model.predict(&[0.0, f64::INFINITY]).is_err());
}

/// Draws one sample path of a zero-mean unit-variance GP at `xs`.
fn sample_gp(xs: &[f64], length: f64, seed: u64) -> Vec<f64> {
    let m = xs.len();
    let mut k = DMatrix::from_fn(m, m, |i, j| {
        correlation_unchecked(std::iter::once(xs[i] - xs[j]), &[length])
    });
    for i in 0..m {
        k[(i, i)] += 1e-10;
    }
    let l = nalgebra::Cholesky::new(k).unwrap().unpack();
    let mut z = vec![0.0; m];
    fill_standard_normal(&mut rng_from_seed(seed), &mut z);
    (l * DVector::from_vec(z)).iter().copied().collect()
}

#[test]
fn recovers_length_scale_of_sampled_process() {
    let true_length = 0.8;
    let xs: Vec<f64> = (0..50).map(|i| -5.0 + 10.0 * i as f64 / 49.0).collect();
    let ys = sample_gp(&xs, true_length, 2024);
    let doe = doe_1d(&xs, &ys);
    let model = KrigingModel::fit(doe, KrigingConfig::default()).unwrap();
    let ratio = model.lengths()[0] / true_length;
    assert!((0.5..=2.0).contains(&ratio), "recovered ratio {ratio}");
}
