//! Failure-probability estimators: crude Monte Carlo, generic importance
//! sampling, and the metamodel-based importance-sampling estimator
//! `p_f = p_fε · α_corr`.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::failure_probability;
use crate::error::{Error, Result};
use crate::mcmc::{
    slice_sample, ChainConfig, ChainDiagnostics, SamplerSettings, UnnormalizedTarget,
};
use crate::problem::{standard_normal_log_density, LimitState};
use crate::refine::{best_start, sphere_probes, DEFAULT_BETA0};
use crate::rng::{chunk_rng, chunks, fill_standard_normal, sub_seed};
use crate::surrogate::Surrogate;

/// A probability estimate with its estimated variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimate: f64,
    pub variance: f64,
    /// `√variance / estimate`; `None` when the estimate is zero.
    pub cov: Option<f64>,
    pub n_samples: usize,
    /// Limit-state evaluations consumed.
    pub n_model_evals: u64,
    pub seed: u64,
}

impl EstimateResult {
    fn new(estimate: f64, variance: f64, n_samples: usize, n_model_evals: u64, seed: u64) -> Self {
        let variance = variance.max(0.0);
        let cov = (estimate > 0.0).then(|| variance.sqrt() / estimate);
        Self {
            estimate,
            variance,
            cov,
            n_samples,
            n_model_evals,
            seed,
        }
    }

    pub fn std_error(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Draws chunk-seeded standard normal vectors and folds `body` over them in
/// parallel; per-chunk partial results come back in chunk order.
fn chunked_normal_draws<T, F>(dimension: usize, total: usize, seed: u64, body: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, &mut [f64], usize) -> Result<T> + Sync,
{
    chunks(total)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut x = vec![0.0; dimension];
            body(&mut rng, &mut x, len)
        })
        .collect()
}

/// Crude Monte Carlo: mean of the failure indicator over `n` standard normal
/// draws, with variance `p̂(1 - p̂)/n`.
pub fn crude_mc(ls: &LimitState, n: usize, seed: u64) -> Result<EstimateResult> {
    if n == 0 {
        return Err(Error::config("estimate", "crude Monte Carlo needs N >= 1"));
    }
    let dim = ls.dimension();
    let failures: u64 = chunked_normal_draws(dim, n, seed, |rng, x, len| {
        let mut count = 0u64;
        for _ in 0..len {
            fill_standard_normal(rng, x);
            if ls.evaluate(x)? <= 0.0 {
                count += 1;
            }
        }
        Ok(count)
    })?
    .into_iter()
    .sum();
    let p = failures as f64 / n as f64;
    Ok(EstimateResult::new(
        p,
        p * (1.0 - p) / n as f64,
        n,
        n as u64,
        seed,
    ))
}

/// Coefficient of variation of crude Monte Carlo with `n` samples at
/// probability `p`: `√((1 - p)/(n p))`.
pub fn crude_mc_cov(p: f64, n: usize) -> f64 {
    ((1.0 - p) / (n as f64 * p)).sqrt()
}

/// Instrumental density for importance sampling, normalized.
pub trait InstrumentalDensity: Sync {
    fn dimension(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut [f64]);
    fn log_density(&self, x: &[f64]) -> f64;
}

/// `h = f`, the standard normal density; draws follow the same stream
/// convention as [`crude_mc`].
#[derive(Debug, Clone, Copy)]
pub struct NominalDensity {
    pub dimension: usize,
}

impl InstrumentalDensity for NominalDensity {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn sample(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        fill_standard_normal(rng, out);
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        standard_normal_log_density(x)
    }
}

/// Importance sampling with likelihood ratio `f/h`. Variance:
/// `(1/(N-1)) ((1/N) Σ 1{g<=0}(f/h)² - p̂²)`, clamped at zero (zero for N = 1).
pub fn importance_sampling<H: InstrumentalDensity + ?Sized>(
    ls: &LimitState,
    instrumental: &H,
    n: usize,
    seed: u64,
) -> Result<EstimateResult> {
    if n == 0 {
        return Err(Error::config(
            "estimate",
            "importance sampling needs N >= 1",
        ));
    }
    let dim = ls.dimension();
    if instrumental.dimension() != dim {
        return Err(Error::DimensionMismatch {
            module: "estimate",
            expected: dim,
            got: instrumental.dimension(),
        });
    }
    let partial = chunks(n)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = chunk_rng(seed, c);
            let mut x = vec![0.0; dim];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..len {
                instrumental.sample(&mut rng, &mut x);
                if ls.evaluate(&x)? <= 0.0 {
                    let log_f = standard_normal_log_density(&x);
                    let log_h = instrumental.log_density(&x);
                    if log_h == f64::NEG_INFINITY && log_f > f64::NEG_INFINITY {
                        return Err(Error::DominationViolation);
                    }
                    let ratio = (log_f - log_h).exp();
                    sum += ratio;
                    sum_sq += ratio * ratio;
                }
            }
            Ok((sum, sum_sq))
        })
        .collect::<Result<Vec<_>>>()?;
    let (sum, sum_sq) = partial
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = n as f64;
    let p = sum / nf;
    let variance = if n > 1 {
        (sum_sq / nf - p * p) / (nf - 1.0)
    } else {
        0.0
    };
    Ok(EstimateResult::new(p, variance, n, n as u64, seed))
}

/// Augmented failure probability: mean of `P[Ĝ(x) <= 0]` over `n_eps`
/// standard normal draws. Costs no limit-state evaluations.
pub fn estimate_pf_eps<S: Surrogate + ?Sized>(
    model: &S,
    n_eps: usize,
    seed: u64,
) -> Result<EstimateResult> {
    if n_eps < 2 {
        return Err(Error::config("estimate", "N_eps must be >= 2"));
    }
    let sigma_g = model.process_std();
    let partial = chunked_normal_draws(model.dimension(), n_eps, seed, |rng, x, len| {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..len {
            fill_standard_normal(rng, x);
            let p = failure_probability(&model.predict(x)?, sigma_g);
            sum += p;
            sum_sq += p * p;
        }
        Ok((sum, sum_sq))
    })?;
    let (sum, sum_sq) = partial
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = n_eps as f64;
    let mean = sum / nf;
    let sample_var = (sum_sq - nf * mean * mean) / (nf - 1.0);
    Ok(EstimateResult::new(mean, sample_var / nf, n_eps, 0, seed))
}

/// Log of the quasi-optimal instrumental density up to a constant:
/// `log P[Ĝ(x) <= 0] + log φ(x)`, `-∞` where the classification vanishes.
pub fn instrumental_log_density<S: Surrogate + ?Sized>(model: &S, x: &[f64]) -> f64 {
    match model.predict(x) {
        Ok(pred) => {
            failure_probability(&pred, model.process_std()).ln() + standard_normal_log_density(x)
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

pub fn instrumental_target<S: Surrogate + ?Sized>(
    model: &S,
) -> UnnormalizedTarget<impl Fn(&[f64]) -> f64 + Sync + '_> {
    UnnormalizedTarget::new(model.dimension(), move |x: &[f64]| {
        instrumental_log_density(model, x)
    })
}

/// Settings of the correction-factor chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaCorrConfig {
    pub n_corr: usize,
    pub sampler: SamplerSettings,
    /// Sphere-uniform candidates for the chain's starting point.
    pub start_probes: usize,
    /// Radius of the start-probe ball; a run copies the refinement's β₀.
    #[serde(skip, default = "default_beta0")]
    pub beta0: f64,
}

fn default_beta0() -> f64 {
    DEFAULT_BETA0
}

impl Default for AlphaCorrConfig {
    fn default() -> Self {
        Self {
            n_corr: 250,
            sampler: SamplerSettings {
                thinning: 10,
                ..SamplerSettings::default()
            },
            start_probes: 100,
            beta0: DEFAULT_BETA0,
        }
    }
}

/// Correction-factor estimate with its chain summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCorrEstimate {
    pub result: EstimateResult,
    pub chain: ChainDiagnostics,
    /// The variance treats the thinned chain as i.i.d.
    pub mcmc_approximate: bool,
}

/// Correction factor `α_corr = E_ĥ*[1{g<=0} / P[Ĝ<=0]]` from `n_corr` chain
/// draws of the quasi-optimal density. Costs `n_corr` limit-state
/// evaluations.
///
/// The chain starts from the best of `start_probes` sphere-uniform points
/// and `extra_starts` (typically the failing DOE points).
pub fn estimate_alpha_corr<S: Surrogate + ?Sized>(
    model: &S,
    ls: &LimitState,
    config: &AlphaCorrConfig,
    seed: u64,
    extra_starts: &[Vec<f64>],
) -> Result<AlphaCorrEstimate> {
    if config.n_corr < 2 {
        return Err(Error::config("estimate", "N_corr must be >= 2"));
    }
    let n = model.dimension();
    if ls.dimension() != n {
        return Err(Error::DimensionMismatch {
            module: "estimate",
            expected: n,
            got: ls.dimension(),
        });
    }
    let mut candidates = sphere_probes(
        n,
        config.beta0,
        config.start_probes,
        sub_seed(seed, "start"),
    );
    candidates.extend(extra_starts.iter().cloned());
    let start =
        best_start(&candidates, |x| instrumental_log_density(model, x)).ok_or_else(|| {
            Error::estimation(
                "estimate",
                "no starting point with positive failure probability was found",
            )
        })?;

    let target = instrumental_target(model);
    let chain_config = ChainConfig::from_settings(
        &config.sampler,
        start,
        config.n_corr,
        sub_seed(seed, "chain"),
    );
    let chain = slice_sample(&target, &chain_config).map_err(|e| match e {
        Error::SamplerStall { .. } => {
            Error::estimation("estimate", format!("correction chain: {e}"))
        }
        other => other,
    })?;

    let sigma_g = model.process_std();
    let ratios = chain
        .samples
        .par_iter()
        .map(|x| {
            let pf = failure_probability(&model.predict(x)?, sigma_g);
            if pf < 1e-12 {
                return Err(Error::estimation(
                    "estimate",
                    format!("chain draw with classification probability {pf:e}"),
                ));
            }
            let fails = ls.evaluate(x)? <= 0.0;
            Ok(if fails { 1.0 / pf } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;

    let nf = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / nf;
    let sample_var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    Ok(AlphaCorrEstimate {
        result: EstimateResult::new(
            mean,
            sample_var / nf,
            ratios.len(),
            ratios.len() as u64,
            seed,
        ),
        chain: chain.diagnostics,
        mcmc_approximate: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaIsSeeds {
    pub pf_eps: u64,
    pub alpha_corr: u64,
}

impl MetaIsSeeds {
    /// Stage seeds derived from a master seed.
    pub fn from_master(master: u64) -> Self {
        Self {
            pf_eps: sub_seed(master, "pf_eps"),
            alpha_corr: sub_seed(master, "alpha_corr"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaIsResult {
    pub pf_eps: EstimateResult,
    pub alpha_corr: EstimateResult,
    /// `pf_eps.estimate × alpha_corr.estimate`.
    pub pf: f64,
    /// First-order combination `√(δ_ε² + δ_corr²)` of the two independent
    /// coefficients of variation; `None` if either is undefined.
    pub cov_combined: Option<f64>,
    pub n_eps: usize,
    pub n_corr: usize,
    pub alpha_chain: ChainDiagnostics,
    pub mcmc_approximate: bool,
}

impl MetaIsResult {
    /// Standard error implied by `cov_combined`.
    pub fn std_error(&self) -> Option<f64> {
        self.cov_combined.map(|c| c * self.pf)
    }

    fn combine(pf_eps: EstimateResult, alpha: AlphaCorrEstimate, n_eps: usize) -> Self {
        let alpha_corr = alpha.result;
        let cov_combined = match (pf_eps.cov, alpha_corr.cov) {
            (Some(a), Some(b)) => Some(a.hypot(b)),
            _ => None,
        };
        Self {
            pf: pf_eps.estimate * alpha_corr.estimate,
            pf_eps,
            alpha_corr,
            cov_combined,
            n_eps,
            n_corr: alpha_corr.n_samples,
            alpha_chain: alpha.chain,
            mcmc_approximate: alpha.mcmc_approximate,
        }
    }
}

/// Metamodel-based importance sampling: `p̂_f = p̂_fε · α̂_corr`.
pub fn meta_is<S: Surrogate + ?Sized>(
    model: &S,
    ls: &LimitState,
    n_eps: usize,
    alpha_config: &AlphaCorrConfig,
    seeds: MetaIsSeeds,
    extra_starts: &[Vec<f64>],
) -> Result<MetaIsResult> {
    let pf_eps = estimate_pf_eps(model, n_eps, seeds.pf_eps)?;
    let alpha = estimate_alpha_corr(model, ls, alpha_config, seeds.alpha_corr, extra_starts)?;
    Ok(MetaIsResult::combine(pf_eps, alpha, n_eps))
}
