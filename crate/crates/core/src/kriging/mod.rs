//! Gaussian-process (kriging) surrogate of the performance function.
//!
//! The model is `G(x) = f(x)ᵀβ + Z(x)` where `Z` is a zero-mean stationary
//! process with variance `σ_G²` and anisotropic squared-exponential
//! correlation. Length scales are found by maximizing the profiled
//! likelihood; `β` and `σ_G²` then follow in closed form.

mod basis;
mod doe;
mod optimize;

pub use basis::RegressionBasis;
pub use doe::{DesignOfExperiments, DEFAULT_MIN_SEPARATION};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::check_point;
use crate::surrogate::{Prediction, Surrogate};
use optimize::BoxedNelderMead;

/// First nugget tried on the correlation diagonal.
pub const NUGGET_START: f64 = 1e-10;
/// Largest nugget before giving up with a conditioning error.
pub const NUGGET_MAX: f64 = 1e-6;

/// Anisotropic squared-exponential correlation `exp(-Σ (dx_k / ℓ_k)²)`.
pub fn correlation(dx: &[f64], lengths: &[f64]) -> Result<f64> {
    if dx.len() != lengths.len() {
        return Err(Error::DimensionMismatch {
            module: "kriging",
            expected: lengths.len(),
            got: dx.len(),
        });
    }
    check_lengths(lengths)?;
    Ok(correlation_unchecked(dx.iter().copied(), lengths))
}

fn check_lengths(lengths: &[f64]) -> Result<()> {
    if lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::config(
            "kriging",
            format!("length scales must be positive and finite, got {lengths:?}"),
        ));
    }
    Ok(())
}

#[inline]
fn correlation_unchecked(dx: impl Iterator<Item = f64>, lengths: &[f64]) -> f64 {
    let s: f64 = dx.zip(lengths).map(|(d, l)| (d / l) * (d / l)).sum();
    (-s).exp()
}

fn correlation_between(a: &[f64], b: &[f64], lengths: &[f64]) -> f64 {
    correlation_unchecked(a.iter().zip(b).map(|(x, y)| x - y), lengths)
}

/// Settings of the maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KrigingConfig {
    pub basis: RegressionBasis,
    /// Per-coordinate `[lower, upper]` bounds on the length scales. `None`
    /// means `[0.01 L_k, 10 L_k]` with `L_k` the DOE range of coordinate `k`.
    pub length_bounds: Option<Vec<[f64; 2]>>,
    /// Number of local searches started from the best isotropic candidates.
    pub n_starts: usize,
    /// Objective evaluations allowed per local search. `None` scales with the
    /// dimension.
    pub max_evaluations: Option<usize>,
}

impl Default for KrigingConfig {
    fn default() -> Self {
        Self {
            basis: RegressionBasis::Constant,
            length_bounds: None,
            n_starts: 2,
            max_evaluations: None,
        }
    }
}

const ISOTROPIC_SCAN: usize = 12;

impl KrigingConfig {
    fn bounds_for(&self, doe: &DesignOfExperiments) -> Result<Vec<[f64; 2]>> {
        let n = doe.dimension();
        let bounds = match &self.length_bounds {
            Some(b) => b.clone(),
            None => doe
                .ranges()
                .into_iter()
                .map(|r| {
                    let r = if r > 0.0 { r } else { 1.0 };
                    [1e-2 * r, 10.0 * r]
                })
                .collect(),
        };
        if bounds.len() != n {
            return Err(Error::DimensionMismatch {
                module: "kriging",
                expected: n,
                got: bounds.len(),
            });
        }
        for [lo, hi] in &bounds {
            if !(*lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
                return Err(Error::config(
                    "kriging",
                    format!("invalid length-scale bounds [{lo}, {hi}]"),
                ));
            }
        }
        Ok(bounds)
    }

    fn evaluations_per_start(&self, n: usize) -> usize {
        self.max_evaluations.unwrap_or(100 + 40 * n)
    }
}

/// Closed-form part of the likelihood maximization at fixed length scales.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodFit {
    pub coefficients: Vec<f64>,
    pub process_variance: f64,
    /// `(m/2) ln σ̂_G² + (1/2) ln det R`, up to an additive constant.
    pub neg_log_likelihood: f64,
    pub nugget: f64,
}

#[derive(Debug, Clone)]
struct Factorization {
    nugget: f64,
    /// Lower Cholesky factor of `R + τI`.
    chol: DMatrix<f64>,
    /// `L⁻¹F`.
    whitened_basis: DMatrix<f64>,
    /// Upper-triangular factor of the QR decomposition of `L⁻¹F`.
    gram_factor: DMatrix<f64>,
    coefficients: DVector<f64>,
    /// `(R + τI)⁻¹ (y - Fβ̂)`.
    weights: DVector<f64>,
    process_variance: f64,
    neg_log_likelihood: f64,
}

impl Factorization {
    fn compute(doe: &DesignOfExperiments, basis: RegressionBasis, lengths: &[f64]) -> Result<Self> {
        let m = doe.len();
        let n = doe.dimension();
        let p = basis.size(n);
        if p + 1 > m {
            return Err(Error::Identifiability { p, m });
        }
        if lengths.len() != n {
            return Err(Error::DimensionMismatch {
                module: "kriging",
                expected: n,
                got: lengths.len(),
            });
        }
        check_lengths(lengths)?;

        let pts = doe.points();
        let corr = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                1.0
            } else {
                correlation_between(&pts[i], &pts[j], lengths)
            }
        });

        let mut nugget = NUGGET_START;
        let chol = loop {
            let mut regularized = corr.clone();
            for i in 0..m {
                regularized[(i, i)] += nugget;
            }
            if let Some(c) = nalgebra::Cholesky::new(regularized) {
                break c.unpack();
            }
            nugget *= 10.0;
            if nugget > NUGGET_MAX * (1.0 + 1e-9) {
                return Err(Error::Conditioning {
                    nugget: nugget / 10.0,
                });
            }
        };

        let mut fmat = DMatrix::zeros(m, p);
        let mut row = vec![0.0; p];
        for (i, x) in pts.iter().enumerate() {
            basis.eval_into(x, &mut row);
            for (k, v) in row.iter().enumerate() {
                fmat[(i, k)] = *v;
            }
        }
        let y = DVector::from_column_slice(doe.values());

        let whitened_basis = chol
            .solve_lower_triangular(&fmat)
            .ok_or(Error::Conditioning { nugget })?;
        let whitened_y = chol
            .solve_lower_triangular(&y)
            .ok_or(Error::Conditioning { nugget })?;

        let qr = whitened_basis.clone().qr();
        let gram_factor = qr.r();
        let max_diag = (0..p)
            .map(|k| gram_factor[(k, k)].abs())
            .fold(0.0, f64::max);
        if (0..p).any(|k| gram_factor[(k, k)].abs() <= 1e-12 * max_diag.max(f64::MIN_POSITIVE)) {
            return Err(Error::Identifiability { p, m });
        }
        let qty = qr.q().transpose() * &whitened_y;
        let coefficients = gram_factor
            .solve_upper_triangular(&qty)
            .ok_or(Error::Identifiability { p, m })?;

        let residual = &whitened_y - &whitened_basis * &coefficients;
        let process_variance = residual.norm_squared() / m as f64;
        let weights = chol
            .tr_solve_lower_triangular(&residual)
            .ok_or(Error::Conditioning { nugget })?;

        let half_log_det: f64 = (0..m).map(|i| chol[(i, i)].ln()).sum();
        let neg_log_likelihood =
            0.5 * m as f64 * process_variance.max(f64::MIN_POSITIVE).ln() + half_log_det;

        Ok(Self {
            nugget,
            chol,
            whitened_basis,
            gram_factor,
            coefficients,
            weights,
            process_variance,
            neg_log_likelihood,
        })
    }
}

/// Generalized least squares for `β̂`, maximum-likelihood `σ̂_G²` (1/m
/// normalization) and the profiled negative log-likelihood at fixed lengths.
pub fn fit_given_lengths(
    doe: &DesignOfExperiments,
    basis: RegressionBasis,
    lengths: &[f64],
) -> Result<LikelihoodFit> {
    let f = Factorization::compute(doe, basis, lengths)?;
    Ok(LikelihoodFit {
        coefficients: f.coefficients.iter().copied().collect(),
        process_variance: f.process_variance,
        neg_log_likelihood: f.neg_log_likelihood,
        nugget: f.nugget,
    })
}

/// A fitted kriging surrogate. Immutable; enrich with [`KrigingModel::add_points`].
#[derive(Debug, Clone)]
pub struct KrigingModel {
    doe: DesignOfExperiments,
    config: KrigingConfig,
    lengths: Vec<f64>,
    factorization: Factorization,
}

/// Result of [`KrigingModel::add_points`].
#[derive(Debug, Clone)]
pub struct Enriched {
    pub model: KrigingModel,
    /// Indices of candidates rejected by the minimum-separation rule.
    pub dropped: Vec<usize>,
}

impl KrigingModel {
    /// Fits length scales by maximum likelihood inside the configured box.
    ///
    /// Search: an isotropic scan over a 12-point log-spaced lattice, then a
    /// box-constrained Nelder–Mead in log space from the best `n_starts`
    /// lattice points. The best candidate ever evaluated is kept.
    pub fn fit(doe: DesignOfExperiments, config: KrigingConfig) -> Result<Self> {
        let n = doe.dimension();
        let p = config.basis.size(n);
        if p + 1 > doe.len() {
            return Err(Error::Identifiability { p, m: doe.len() });
        }
        let bounds = config.bounds_for(&doe)?;
        let lower: Vec<f64> = bounds.iter().map(|b| b[0].ln()).collect();
        let upper: Vec<f64> = bounds.iter().map(|b| b[1].ln()).collect();

        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut objective = |theta: &[f64]| -> f64 {
            let lengths: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
            match Factorization::compute(&doe, config.basis, &lengths) {
                Ok(f) => {
                    let v = f.neg_log_likelihood;
                    if best.as_ref().is_none_or(|(_, b)| v < *b) {
                        best = Some((theta.to_vec(), v));
                    }
                    v
                }
                Err(_) => f64::INFINITY,
            }
        };

        let mut scan: Vec<(Vec<f64>, f64)> = (0..ISOTROPIC_SCAN)
            .map(|i| {
                let t = i as f64 / (ISOTROPIC_SCAN - 1) as f64;
                let theta: Vec<f64> = lower
                    .iter()
                    .zip(&upper)
                    .map(|(lo, hi)| lo + t * (hi - lo))
                    .collect();
                let v = objective(&theta);
                (theta, v)
            })
            .collect();
        scan.sort_by(|a, b| a.1.total_cmp(&b.1));

        let nm = BoxedNelderMead {
            lower: &lower,
            upper: &upper,
            initial_step: 0.15,
            max_evaluations: config.evaluations_per_start(n),
            tolerance: 1e-9,
        };
        for (start, value) in scan.iter().take(config.n_starts) {
            if value.is_finite() {
                nm.minimize(start, &mut objective);
            }
        }

        let (theta, _) = best.ok_or(Error::FitFailure)?;
        let lengths: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        Self::with_lengths(doe, config, lengths)
    }

    /// Builds the model at fixed length scales, skipping the search.
    pub fn with_lengths(
        doe: DesignOfExperiments,
        config: KrigingConfig,
        lengths: Vec<f64>,
    ) -> Result<Self> {
        let factorization = Factorization::compute(&doe, config.basis, &lengths)?;
        Ok(Self {
            doe,
            config,
            lengths,
            factorization,
        })
    }

    /// Refits on the union of the current DOE and the admissible candidates.
    pub fn add_points(&self, points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Enriched> {
        let mut doe = self.doe.clone();
        let dropped = doe.extend(points, values)?;
        if doe.len() == self.doe.len() {
            return Ok(Enriched {
                model: self.clone(),
                dropped,
            });
        }
        Ok(Enriched {
            model: Self::fit(doe, self.config.clone())?,
            dropped,
        })
    }

    pub fn doe(&self) -> &DesignOfExperiments {
        &self.doe
    }

    pub fn config(&self) -> &KrigingConfig {
        &self.config
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn nugget(&self) -> f64 {
        self.factorization.nugget
    }

    pub fn process_variance(&self) -> f64 {
        self.factorization.process_variance
    }

    pub fn coefficients(&self) -> &[f64] {
        self.factorization.coefficients.as_slice()
    }

    pub fn neg_log_likelihood(&self) -> f64 {
        self.factorization.neg_log_likelihood
    }

    /// Correlations `r(x)` with the DOE. An input that coincides exactly with
    /// a DOE point picks up the nugget, so the posterior at observed inputs
    /// is exact.
    fn cross_correlation(&self, x: &[f64]) -> DVector<f64> {
        let nugget = self.factorization.nugget;
        DVector::from_iterator(
            self.doe.len(),
            self.doe.points().iter().map(|p| {
                let r = correlation_between(x, p, &self.lengths);
                if p.as_slice() == x {
                    r + nugget
                } else {
                    r
                }
            }),
        )
    }

    /// Mean and standard deviation of the kriging prediction at `x`.
    ///
    /// The variance is the universal-kriging expression
    /// `σ_G² (1 - rᵀR⁻¹r + uᵀ(FᵀR⁻¹F)⁻¹u)` with `u = FᵀR⁻¹r - f(x)`, which is
    /// the bordered-matrix form written out; it is clamped at zero.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        check_point("kriging", self.doe.dimension(), x)?;
        let fac = &self.factorization;
        let r = self.cross_correlation(x);
        let f = DVector::from_vec(self.config.basis.eval(x));

        let mean = f.dot(&fac.coefficients) + r.dot(&fac.weights);

        let whitened_r = fac
            .chol
            .solve_lower_triangular(&r)
            .ok_or(Error::Conditioning { nugget: fac.nugget })?;
        let u = fac.whitened_basis.tr_mul(&whitened_r) - f;
        let v = fac
            .gram_factor
            .tr_solve_upper_triangular(&u)
            .ok_or(Error::Conditioning { nugget: fac.nugget })?;
        let reduction = 1.0 - whitened_r.norm_squared() + v.norm_squared();
        let variance = (fac.process_variance * reduction).max(0.0);

        Ok(Prediction {
            mean,
            std: variance.sqrt(),
        })
    }
}

impl Surrogate for KrigingModel {
    fn dimension(&self) -> usize {
        self.doe.dimension()
    }

    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        KrigingModel::predict(self, x)
    }

    fn process_std(&self) -> f64 {
        self.factorization.process_variance.sqrt()
    }
}

#[cfg(test)]
mod tests;
