//! Coordinate-wise slice sampling (stepping-out and shrinkage) for
//! unnormalized log-densities on ℝⁿ. A log-density of `-∞` encodes zero
//! density.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Contractions allowed in one shrinkage loop before reporting a stall.
pub const MAX_CONTRACTIONS: usize = 1000;

/// Log-density known up to an additive constant.
pub trait LogDensity: Sync {
    fn dimension(&self) -> usize;
    fn log_density(&self, x: &[f64]) -> f64;
}

/// A closure-backed [`LogDensity`].
pub struct UnnormalizedTarget<F> {
    dimension: usize,
    log_density: F,
}

impl<F> UnnormalizedTarget<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dimension: usize, log_density: F) -> Self {
        Self {
            dimension,
            log_density,
        }
    }
}

impl<F> LogDensity for UnnormalizedTarget<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        (self.log_density)(x)
    }
}

/// Tuning shared by every chain of a run; combined with a start point, a
/// sample count and a seed into a [`ChainConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSettings {
    pub burn_in: usize,
    pub thinning: usize,
    pub step_width: f64,
    pub max_step_out: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            thinning: 5,
            step_width: 1.0,
            max_step_out: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n_samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub initial_point: Vec<f64>,
    /// Initial slice width, one entry per coordinate.
    pub step_width: Vec<f64>,
    pub max_step_out: usize,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(initial_point: Vec<f64>, n_samples: usize, seed: u64) -> Self {
        Self::from_settings(&SamplerSettings::default(), initial_point, n_samples, seed)
    }

    pub fn from_settings(
        settings: &SamplerSettings,
        initial_point: Vec<f64>,
        n_samples: usize,
        seed: u64,
    ) -> Self {
        let n = initial_point.len();
        Self {
            n_samples,
            burn_in: settings.burn_in,
            thinning: settings.thinning,
            initial_point,
            step_width: vec![settings.step_width; n],
            max_step_out: settings.max_step_out,
            seed,
        }
    }

    fn validate(&self, dimension: usize) -> Result<()> {
        if self.initial_point.len() != dimension {
            return Err(Error::DimensionMismatch {
                module: "mcmc",
                expected: dimension,
                got: self.initial_point.len(),
            });
        }
        if self.step_width.len() != dimension {
            return Err(Error::DimensionMismatch {
                module: "mcmc",
                expected: dimension,
                got: self.step_width.len(),
            });
        }
        if self.n_samples == 0 || self.thinning == 0 || self.max_step_out == 0 {
            return Err(Error::config(
                "mcmc",
                "n_samples, thinning and max_step_out must be positive",
            ));
        }
        if self
            .step_width
            .iter()
            .any(|w| !(*w > 0.0) || !w.is_finite())
        {
            return Err(Error::config("mcmc", "step widths must be positive"));
        }
        Ok(())
    }
}

/// Chain summary exported alongside estimates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub kept: usize,
    pub iterations: usize,
    pub density_evaluations: usize,
    /// Stepping-out loops that ended because the step budget ran out rather
    /// than by leaving the slice.
    pub step_out_limit_hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub samples: Vec<Vec<f64>>,
    pub diagnostics: ChainDiagnostics,
}

/// Runs one slice-sampling chain. Each iteration updates every coordinate
/// in order; the first `burn_in` iterations are discarded and every
/// `thinning`-th iteration is kept afterwards.
pub fn slice_sample<T: LogDensity + ?Sized>(target: &T, config: &ChainConfig) -> Result<Chain> {
    let n = target.dimension();
    config.validate(n)?;
    let mut x = config.initial_point.clone();
    let mut current = target.log_density(&x);
    if !current.is_finite() {
        return Err(Error::input(
            "mcmc",
            format!("initial point has log-density {current}"),
        ));
    }

    let mut rng = rng_from_seed(config.seed);
    let mut diag = ChainDiagnostics::default();
    let mut samples = Vec::with_capacity(config.n_samples);
    let total = config.burn_in + config.n_samples * config.thinning;

    let mut probe = x.clone();
    let log_at = |p: &[f64], diag: &mut ChainDiagnostics| {
        diag.density_evaluations += 1;
        let v = target.log_density(p);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    for iteration in 0..total {
        for i in 0..n {
            let x0 = x[i];
            let w = config.step_width[i];
            let level = current - rng.sample::<f64, _>(Exp1);

            let mut left = x0 - w * rng.random::<f64>();
            let mut right = left + w;
            let mut budget_left = (config.max_step_out as f64 * rng.random::<f64>()) as usize;
            let mut budget_right = config.max_step_out - 1 - budget_left;

            probe.copy_from_slice(&x);
            loop {
                probe[i] = left;
                if log_at(&probe, &mut diag) <= level {
                    break;
                }
                if budget_left == 0 {
                    diag.step_out_limit_hits += 1;
                    break;
                }
                left -= w;
                budget_left -= 1;
            }
            loop {
                probe[i] = right;
                if log_at(&probe, &mut diag) <= level {
                    break;
                }
                if budget_right == 0 {
                    diag.step_out_limit_hits += 1;
                    break;
                }
                right += w;
                budget_right -= 1;
            }

            let mut accepted = false;
            for _ in 0..MAX_CONTRACTIONS {
                let candidate = left + rng.random::<f64>() * (right - left);
                probe[i] = candidate;
                let lp = log_at(&probe, &mut diag);
                if lp > level {
                    x[i] = candidate;
                    current = lp;
                    accepted = true;
                    break;
                }
                if candidate < x0 {
                    left = candidate;
                } else {
                    right = candidate;
                }
            }
            if !accepted {
                return Err(Error::SamplerStall {
                    coordinate: i,
                    contractions: MAX_CONTRACTIONS,
                });
            }
        }
        diag.iterations += 1;
        if iteration >= config.burn_in
            && (iteration - config.burn_in + 1).is_multiple_of(config.thinning)
        {
            samples.push(x.clone());
        }
    }
    diag.kept = samples.len();
    Ok(Chain {
        samples,
        diagnostics: diag,
    })
}
