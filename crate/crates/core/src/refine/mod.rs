//! Adaptive enrichment of the design of experiments.
//!
//! Each iteration samples the pseudo-density `C(u) ∝ P[u ∈ M] · 1{|u| <= β₀}`
//! with a slice-sampling chain, condenses the chain with k-means, evaluates
//! the limit state at the cluster centers and refits the kriging model.

mod kmeans;

pub use kmeans::kmeans;

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{margin_probability, MarginSpec};
use crate::error::{Error, Result};
use crate::kriging::KrigingModel;
use crate::mcmc::{
    slice_sample, ChainConfig, ChainDiagnostics, SamplerSettings, UnnormalizedTarget,
};
use crate::problem::LimitState;
use crate::rng::{sub_seed, uniform_in_ball};
use crate::surrogate::Surrogate;

/// Radius of the sampling hypersphere in standard normal space.
pub const DEFAULT_BETA0: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementConfig {
    pub margin_k: MarginSpec,
    pub beta0: f64,
    /// Chain draws per iteration.
    pub n_candidates: usize,
    /// Points added per iteration (`K`).
    pub points_per_iteration: usize,
    /// Total limit-state evaluations allowed, initial DOE included.
    pub budget: usize,
    /// Set programmatically (derived from the run's master seed).
    #[serde(skip)]
    pub seed: u64,
    pub sampler: SamplerSettings,
    /// Sphere-uniform points used to pick the chain's starting point.
    pub start_probes: usize,
    /// Size of the fixed probe set behind the margin-mass diagnostic.
    pub probe_size: usize,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            margin_k: MarginSpec::default(),
            beta0: DEFAULT_BETA0,
            n_candidates: 10_000,
            points_per_iteration: 10,
            budget: 100,
            seed: 0,
            // the candidate cloud is condensed by k-means, so a short burn-in
            // and no thinning suffice
            sampler: SamplerSettings {
                burn_in: 200,
                thinning: 1,
                ..SamplerSettings::default()
            },
            start_probes: 10_000,
            probe_size: 10_000,
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta0 > 0.0) || !self.beta0.is_finite() {
            return Err(Error::config("refine", "beta0 must be positive"));
        }
        if self.points_per_iteration == 0 {
            return Err(Error::config("refine", "points_per_iteration must be >= 1"));
        }
        if self.n_candidates < self.points_per_iteration {
            return Err(Error::config(
                "refine",
                "n_candidates must be at least points_per_iteration",
            ));
        }
        if self.start_probes == 0 {
            return Err(Error::config("refine", "start_probes must be >= 1"));
        }
        Ok(())
    }
}

/// Log of the uniform weighting density on the β₀-ball: `0` inside
/// (boundary included), `-∞` outside.
pub fn weight_density_log(u: &[f64], beta0: f64) -> f64 {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= beta0 {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

/// `log P[u ∈ M] + log w(u)`.
pub fn criterion_log<S: Surrogate + ?Sized>(
    model: &S,
    spec: MarginSpec,
    beta0: f64,
    u: &[f64],
) -> Result<f64> {
    let w = weight_density_log(u, beta0);
    if w == f64::NEG_INFINITY {
        return Ok(w);
    }
    let p = margin_probability(&model.predict(u)?, model.process_std(), spec);
    Ok(p.ln() + w)
}

/// Fraction of `probes` whose margin probability exceeds 1/2.
pub fn margin_mass<S: Surrogate + ?Sized>(
    model: &S,
    spec: MarginSpec,
    probes: &[Vec<f64>],
) -> Result<f64> {
    let sigma_g = model.process_std();
    let inside = probes
        .par_iter()
        .map(|u| {
            model
                .predict(u)
                .map(|pred| usize::from(margin_probability(&pred, sigma_g, spec) > 0.5))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(inside as f64 / probes.len() as f64)
}

/// Fixed sphere-uniform probe set.
pub fn sphere_probes(dimension: usize, beta0: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| uniform_in_ball(&mut rng, dimension, beta0))
        .collect()
}

/// The point with the largest log-density among `candidates`, if any has a
/// finite one.
pub(crate) fn best_start<F>(candidates: &[Vec<f64>], log_density: F) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    candidates
        .par_iter()
        .map(|u| (log_density(u), u))
        .filter(|(v, _)| v.is_finite())
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .map(|(_, u)| u.clone())
}

/// One enrichment step.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum RefineOutcome {
    Enriched {
        model: KrigingModel,
        /// Points where the limit state was evaluated, with their values.
        evaluated: Vec<(Vec<f64>, f64)>,
        chain: ChainDiagnostics,
    },
    /// The margin is numerically empty; nothing was evaluated.
    MarginConverged,
}

/// Runs one enrichment step adding `config.points_per_iteration` points.
pub fn refine_once(
    model: &KrigingModel,
    ls: &LimitState,
    config: &RefinementConfig,
) -> Result<RefineOutcome> {
    config.validate()?;
    let n = model.doe().dimension();
    if ls.dimension() != n {
        return Err(Error::DimensionMismatch {
            module: "refine",
            expected: n,
            got: ls.dimension(),
        });
    }
    let spec = config.margin_k;
    let beta0 = config.beta0;
    let log_c = |u: &[f64]| criterion_log(model, spec, beta0, u).unwrap_or(f64::NEG_INFINITY);

    let starts = sphere_probes(
        n,
        beta0,
        config.start_probes,
        sub_seed(config.seed, "start"),
    );
    let Some(start) = best_start(&starts, log_c) else {
        return Ok(RefineOutcome::MarginConverged);
    };

    let target = UnnormalizedTarget::new(n, log_c);
    let chain_config = ChainConfig::from_settings(
        &config.sampler,
        start,
        config.n_candidates,
        sub_seed(config.seed, "chain"),
    );
    let chain = match slice_sample(&target, &chain_config) {
        Ok(chain) => chain,
        Err(Error::SamplerStall { .. }) => return Ok(RefineOutcome::MarginConverged),
        Err(e) => return Err(e),
    };

    let centers = kmeans(
        &chain.samples,
        config.points_per_iteration,
        sub_seed(config.seed, "kmeans"),
    )?;

    // a center can land where the criterion vanishes (e.g. on a DOE point);
    // fall back to the nearest chain draw, which lies inside the margin
    let mut selected: Vec<Vec<f64>> = Vec::with_capacity(centers.len());
    for center in centers {
        let point = if log_c(&center).is_finite() {
            center
        } else {
            nearest_sample(&chain.samples, &center)
        };
        let admissible = model.doe().admits(&point)
            && selected
                .iter()
                .all(|q| dist(q, &point) >= model.doe().min_separation());
        if admissible {
            selected.push(point);
        }
    }
    if selected.is_empty() {
        return Ok(RefineOutcome::MarginConverged);
    }

    let values = selected
        .par_iter()
        .map(|u| ls.evaluate(u))
        .collect::<Result<Vec<f64>>>()?;
    let enriched = model.add_points(selected.clone(), values.clone())?;
    debug_assert!(enriched.dropped.is_empty());
    Ok(RefineOutcome::Enriched {
        model: enriched.model,
        evaluated: selected.into_iter().zip(values).collect(),
        chain: chain.diagnostics,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn nearest_sample(samples: &[Vec<f64>], center: &[f64]) -> Vec<f64> {
    samples
        .iter()
        .min_by(|a, b| dist(a, center).total_cmp(&dist(b, center)))
        .cloned()
        .unwrap_or_else(|| center.to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub doe_size: usize,
    pub margin_mass: f64,
    pub lengths: Vec<f64>,
    pub wall_time_ms: f64,
    pub chain: ChainDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BudgetExhausted,
    MarginConverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementTrace {
    /// Margin mass of the model before any enrichment.
    pub initial_margin_mass: f64,
    pub records: Vec<IterationRecord>,
    pub stop_reason: StopReason,
}

impl RefinementTrace {
    /// Writes `iteration,doe_size,margin_mass,wall_time_ms`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["iteration", "doe_size", "margin_mass", "wall_time_ms"])?;
        for r in &self.records {
            csv.write_record(&[
                r.iteration.to_string(),
                r.doe_size.to_string(),
                r.margin_mass.to_string(),
                format!("{:.3}", r.wall_time_ms),
            ])?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Repeats [`refine_once`] until the budget is spent or the margin empties.
/// The last iteration is shortened when fewer than `K` evaluations remain.
/// Iteration `i` uses seed `sub_seed(config.seed, "iteration-{i}")`.
pub fn refine_until_budget(
    model: KrigingModel,
    ls: &LimitState,
    config: &RefinementConfig,
) -> Result<(KrigingModel, RefinementTrace)> {
    config.validate()?;
    let n = model.doe().dimension();
    if config.budget < model.doe().len() {
        return Err(Error::config(
            "refine",
            format!(
                "budget {} is smaller than the initial DOE ({} points)",
                config.budget,
                model.doe().len()
            ),
        ));
    }
    let probes = sphere_probes(
        n,
        config.beta0,
        config.probe_size,
        sub_seed(config.seed, "probe"),
    );
    let initial_margin_mass = if probes.is_empty() {
        f64::NAN
    } else {
        margin_mass(&model, config.margin_k, &probes)?
    };

    let mut model = model;
    let mut records = Vec::new();
    let mut stop_reason = StopReason::BudgetExhausted;
    let mut iteration = 0;
    while model.doe().len() < config.budget {
        let remaining = config.budget - model.doe().len();
        let step_config = RefinementConfig {
            points_per_iteration: config.points_per_iteration.min(remaining),
            seed: sub_seed(config.seed, &format!("iteration-{iteration}")),
            ..config.clone()
        };
        let started = Instant::now();
        match refine_once(&model, ls, &step_config)? {
            RefineOutcome::MarginConverged => {
                stop_reason = StopReason::MarginConverged;
                break;
            }
            RefineOutcome::Enriched {
                model: next, chain, ..
            } => {
                model = next;
                let mass = if probes.is_empty() {
                    f64::NAN
                } else {
                    margin_mass(&model, config.margin_k, &probes)?
                };
                records.push(IterationRecord {
                    iteration,
                    doe_size: model.doe().len(),
                    margin_mass: mass,
                    lengths: model.lengths().to_vec(),
                    wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
                    chain,
                });
            }
        }
        iteration += 1;
    }
    Ok((
        model,
        RefinementTrace {
            initial_margin_mass,
            records,
            stop_reason,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::FnSurrogate;

    #[test]
    fn weight_density_examples() {
        assert_eq!(weight_density_log(&[0.0, 0.0], 8.0), 0.0);
        assert_eq!(weight_density_log(&[8.0, 0.0], 8.0), 0.0);
        assert_eq!(
            weight_density_log(&[8.0 + 1e-6, 0.0], 8.0),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn criterion_examples() {
        let s = FnSurrogate::new(2, 1.0, |x: &[f64]| {
            (x[0], if x[1] == 0.5 { 0.0 } else { 1.0 })
        });
        let spec = MarginSpec::default();
        let c = criterion_log(&s, spec, 8.0, &[0.0, 0.0]).unwrap();
        assert!((c - 0.95f64.ln()).abs() < 1e-12);
        assert_eq!(
            criterion_log(&s, spec, 8.0, &[9.0, 0.0]).unwrap(),
            f64::NEG_INFINITY
        );
        // zero predictive std, as at a DOE point
        assert_eq!(
            criterion_log(&s, spec, 8.0, &[0.0, 0.5]).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn config_validation() {
        assert!(RefinementConfig::default().validate().is_ok());
        let bad = RefinementConfig {
            beta0: 0.0,
            ..RefinementConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RefinementConfig {
            points_per_iteration: 0,
            ..RefinementConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
