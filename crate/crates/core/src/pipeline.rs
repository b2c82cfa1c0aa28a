//! End-to-end runs: initial DOE → kriging fit → refinement → meta-IS, with
//! the on-disk artifacts (`result.json`, `trace.csv`, `doe.csv`, `grid.csv`).
//!
//! Sub-seeds are derived from the master seed by stage label
//! (see [`crate::rng::sub_seed`]): `doe`, `refine`, `pf_eps`, `alpha_corr`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::write_grid_csv;
use crate::error::{Error, Result};
use crate::estimate::{crude_mc_cov, meta_is, AlphaCorrConfig, MetaIsResult, MetaIsSeeds};
use crate::kriging::{DesignOfExperiments, KrigingConfig, KrigingModel};
use crate::problem::{Benchmark, LimitState};
use crate::refine::{refine_until_budget, RefinementConfig, RefinementTrace, StopReason};
use crate::rng::{rng_from_seed, sub_seed, uniform_in_ball};

/// Version of the `result.json` layout and the CSV headers.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    /// Reliability index of `linear`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Dimension of `linear` (default 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

impl ProblemSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            beta: None,
            dimension: None,
        }
    }

    pub fn benchmark(&self) -> Result<Benchmark> {
        let bench = Benchmark::from_name(&self.name, self.beta)?;
        Ok(match (bench, self.dimension) {
            (Benchmark::Linear { beta, .. }, Some(dimension)) if dimension > 0 => {
                Benchmark::Linear { beta, dimension }
            }
            (_, Some(d)) if d != bench.dimension() => {
                return Err(Error::config(
                    "cli",
                    format!(
                        "problem `{}` has fixed dimension {}",
                        self.name,
                        bench.dimension()
                    ),
                ))
            }
            (b, _) => b,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoeRule {
    /// Uniform in the β₀-ball.
    #[default]
    SphereUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoeSpec {
    pub size: usize,
    #[serde(default)]
    pub rule: DoeRule,
}

fn default_n_eps() -> usize {
    100_000
}

fn default_grid_resolution() -> usize {
    101
}

/// A complete run description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub seed: u64,
    #[serde(default = "default_n_eps")]
    pub n_eps: usize,
    pub doe: DoeSpec,
    #[serde(default)]
    pub kriging: KrigingConfig,
    #[serde(default)]
    pub refinement: RefinementConfig,
    #[serde(default)]
    pub alpha_corr: AlphaCorrConfig,
    /// Points per axis of `grid.csv` (two-dimensional problems only).
    #[serde(default = "default_grid_resolution")]
    pub grid_resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults tuned per catalog problem.
    pub fn preset(problem: &str, seed: u64) -> Result<Self> {
        let bench = Benchmark::from_name(problem, None)?;
        let mut config = Self {
            problem: ProblemSpec::named(problem),
            seed,
            n_eps: default_n_eps(),
            doe: DoeSpec {
                size: 12,
                rule: DoeRule::SphereUniform,
            },
            kriging: KrigingConfig::default(),
            refinement: RefinementConfig::default(),
            alpha_corr: AlphaCorrConfig {
                n_corr: 300,
                ..AlphaCorrConfig::default()
            },
            grid_resolution: default_grid_resolution(),
            output: None,
        };
        if let Benchmark::Quad20 = bench {
            config.n_eps = 1_000_000;
            config.doe.size = 40;
            config.kriging.max_evaluations = Some(400);
            config.refinement.budget = 200;
            config.refinement.points_per_iteration = 20;
            config.refinement.n_candidates = 2000;
            config.refinement.probe_size = 2000;
        }
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<Benchmark> {
        let bench = self.problem.benchmark()?;
        self.validate_for(bench.dimension())?;
        Ok(bench)
    }

    /// Checks everything but the problem name against a dimension-`n` problem.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        if self.doe.size < n + 2 {
            return Err(Error::config(
                "cli",
                format!(
                    "initial DOE size {} must be at least n + 2 = {}",
                    self.doe.size,
                    n + 2
                ),
            ));
        }
        self.refinement.validate()?;
        let budget = self.refinement.budget;
        if budget < self.doe.size {
            return Err(Error::config(
                "cli",
                format!(
                    "budget {budget} is smaller than the initial DOE ({})",
                    self.doe.size
                ),
            ));
        }
        if budget > self.doe.size && self.refinement.points_per_iteration > budget - self.doe.size {
            return Err(Error::config(
                "cli",
                format!(
                    "K = {} exceeds the refinement budget {} - {} = {}",
                    self.refinement.points_per_iteration,
                    budget,
                    self.doe.size,
                    budget - self.doe.size
                ),
            ));
        }
        if self.n_eps < 2 || self.alpha_corr.n_corr < 2 {
            return Err(Error::config("cli", "n_eps and n_corr must be >= 2"));
        }
        if self.alpha_corr.sampler.thinning == 0 || self.refinement.sampler.thinning == 0 {
            return Err(Error::config("cli", "thinning must be positive"));
        }
        Ok(())
    }
}

/// `m0` points uniform in the `n`-ball of radius `beta0`.
pub fn initial_doe(n: usize, m0: usize, beta0: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if m0 < n + 2 {
        return Err(Error::config(
            "cli",
            format!("initial DOE size {m0} must be at least n + 2 = {}", n + 2),
        ));
    }
    if !(beta0 > 0.0) {
        return Err(Error::config("cli", "beta0 must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..m0)
        .map(|_| uniform_in_ball(&mut rng, n, beta0))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedReport {
    pub master: u64,
    pub doe: u64,
    pub refine: u64,
    pub pf_eps: u64,
    pub alpha_corr: u64,
}

impl SeedReport {
    pub fn from_master(master: u64) -> Self {
        let meta = MetaIsSeeds::from_master(master);
        Self {
            master,
            doe: sub_seed(master, "doe"),
            refine: sub_seed(master, "refine"),
            pf_eps: meta.pf_eps,
            alpha_corr: meta.alpha_corr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub initial_doe_evals: u64,
    pub refinement_evals: u64,
    pub alpha_corr_evals: u64,
    /// Limit-state counter at the end of the run.
    pub total_g_evals: u64,
    /// Surrogate-only draws behind `p_fε` (no limit-state cost).
    pub surrogate_draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementSummary {
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub initial_margin_mass: f64,
    pub final_margin_mass: f64,
    pub final_doe_size: usize,
    pub lengths: Vec<f64>,
    pub process_variance: f64,
    pub trace_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub refinement_wall_time_ms: f64,
    pub estimation_wall_time_ms: f64,
    pub wall_time_ms: f64,
}

/// Contents of `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub problem: String,
    pub dimension: usize,
    pub seeds: SeedReport,
    pub budgets: Budgets,
    pub refinement: RefinementSummary,
    pub result: MetaIsResult,
    pub timing: Timing,
}

pub struct RunArtifacts {
    pub report: RunReport,
    pub model: KrigingModel,
    pub trace: RefinementTrace,
    pub grid_resolution: usize,
    pub beta0: f64,
}

/// Runs the full pipeline with the benchmark named in `config`.
pub fn run(config: &RunConfig) -> Result<RunArtifacts> {
    let bench = config.validate()?;
    let ls = bench.limit_state();
    run_with(config, &ls)
}

/// Runs the full pipeline against a caller-supplied limit state; the
/// problem section of `config` only contributes its name to the report.
pub fn run_with(config: &RunConfig, ls: &LimitState) -> Result<RunArtifacts> {
    let started = Instant::now();
    let n = ls.dimension();
    config.validate_for(n)?;
    let seeds = SeedReport::from_master(config.seed);
    let beta0 = config.refinement.beta0;
    let start_count = ls.eval_count();

    let points = initial_doe(n, config.doe.size, beta0, seeds.doe)?;
    let values = points
        .par_iter()
        .map(|u| ls.evaluate(u))
        .collect::<Result<Vec<f64>>>()?;
    let doe = DesignOfExperiments::new(points, values)?;
    let initial_doe_evals = ls.eval_count() - start_count;

    let model = KrigingModel::fit(doe, config.kriging.clone())?;
    let refinement = RefinementConfig {
        seed: seeds.refine,
        ..config.refinement.clone()
    };
    let (model, trace) = refine_until_budget(model, ls, &refinement)?;
    let refinement_evals = ls.eval_count() - start_count - initial_doe_evals;
    let refinement_ms = started.elapsed().as_secs_f64() * 1e3;

    let failing: Vec<Vec<f64>> = model
        .doe()
        .points()
        .iter()
        .zip(model.doe().values())
        .filter(|(_, v)| **v <= 0.0)
        .map(|(p, _)| p.clone())
        .collect();
    let alpha_config = AlphaCorrConfig {
        beta0,
        ..config.alpha_corr.clone()
    };
    let meta_seeds = MetaIsSeeds {
        pf_eps: seeds.pf_eps,
        alpha_corr: seeds.alpha_corr,
    };
    let estimation_started = Instant::now();
    let result = meta_is(
        &model,
        ls,
        config.n_eps,
        &alpha_config,
        meta_seeds,
        &failing,
    )?;
    let estimation_ms = estimation_started.elapsed().as_secs_f64() * 1e3;

    let final_margin_mass = trace
        .records
        .last()
        .map_or(trace.initial_margin_mass, |r| r.margin_mass);
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        problem: config.problem.name.clone(),
        dimension: n,
        budgets: Budgets {
            initial_doe_evals,
            refinement_evals,
            alpha_corr_evals: result.alpha_corr.n_model_evals,
            total_g_evals: ls.eval_count() - start_count,
            surrogate_draws: config.n_eps as u64,
        },
        refinement: RefinementSummary {
            iterations: trace.records.len(),
            stop_reason: trace.stop_reason,
            initial_margin_mass: trace.initial_margin_mass,
            final_margin_mass,
            final_doe_size: model.doe().len(),
            lengths: model.lengths().to_vec(),
            process_variance: model.process_variance(),
            trace_file: "trace.csv".to_owned(),
        },
        seeds,
        result,
        timing: Timing {
            refinement_wall_time_ms: refinement_ms,
            estimation_wall_time_ms: estimation_ms,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        },
    };
    Ok(RunArtifacts {
        report,
        model,
        trace,
        grid_resolution: config.grid_resolution,
        beta0,
    })
}

impl RunArtifacts {
    /// Writes `result.json`, `trace.csv`, `doe.csv` and, for two-dimensional
    /// problems, `grid.csv` into `dir` (created if missing).
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&self.report)?;
        fs::write(dir.join("result.json"), json + "\n")?;
        self.trace
            .write_csv(fs::File::create(dir.join("trace.csv"))?)?;
        self.model
            .doe()
            .write_csv(fs::File::create(dir.join("doe.csv"))?)?;
        if self.report.dimension == 2 {
            write_grid_csv(
                &self.model,
                crate::classify::MarginSpec::default(),
                -self.beta0,
                self.beta0,
                self.grid_resolution.max(2),
                fs::File::create(dir.join("grid.csv"))?,
            )?;
        }
        Ok(())
    }
}

/// One line of `bench` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub oracle_pf: f64,
    pub oracle_cov: Option<f64>,
    pub oracle_samples: usize,
    pub metais_pf: f64,
    pub metais_cov: Option<f64>,
    pub metais_g_evals: u64,
    /// CoV crude Monte Carlo would have with the same number of `g` calls.
    pub crude_cov_same_budget: f64,
}

impl BenchRow {
    pub const HEADER: &'static str =
        "problem,oracle_pf,oracle_cov,oracle_samples,metais_pf,metais_cov,metais_g_evals,crude_cov_same_budget";

    pub fn to_csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_owned(), |c| format!("{c:.4}"));
        format!(
            "{},{:.6e},{},{},{:.6e},{},{},{:.4}",
            self.problem,
            self.oracle_pf,
            opt(self.oracle_cov),
            self.oracle_samples,
            self.metais_pf,
            opt(self.metais_cov),
            self.metais_g_evals,
            self.crude_cov_same_budget
        )
    }
}

/// Crude Monte-Carlo oracle with `oracle_samples` draws next to a meta-IS
/// run of `config`.
pub fn bench(config: &RunConfig, oracle_samples: usize) -> Result<(BenchRow, RunArtifacts)> {
    let bench = config.validate()?;
    let oracle_ls = bench.limit_state();
    let oracle =
        crate::estimate::crude_mc(&oracle_ls, oracle_samples, sub_seed(config.seed, "oracle"))?;
    let artifacts = run(config)?;
    let g_evals = artifacts.report.budgets.total_g_evals;
    let row = BenchRow {
        problem: config.problem.name.clone(),
        oracle_pf: oracle.estimate,
        oracle_cov: oracle.cov,
        oracle_samples,
        metais_pf: artifacts.report.result.pf,
        metais_cov: artifacts.report.result.cov_combined,
        metais_g_evals: g_evals,
        crude_cov_same_budget: crude_mc_cov(oracle.estimate, g_evals as usize),
    };
    Ok((row, artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_doe_stays_in_ball_and_is_deterministic() {
        let a = initial_doe(3, 50, 8.0, 4).unwrap();
        assert!(a
            .iter()
            .all(|u| u.iter().map(|v| v * v).sum::<f64>().sqrt() <= 8.0));
        assert_eq!(a, initial_doe(3, 50, 8.0, 4).unwrap());
        assert!(initial_doe(3, 4, 8.0, 4).is_err());
    }

    #[test]
    fn initial_doe_radius_distribution() {
        // area ratio: P(|u| <= r) = r² in the unit disk
        let pts = initial_doe(2, 10_000, 1.0, 21).unwrap();
        let r = 0.5f64.sqrt();
        let frac = pts
            .iter()
            .filter(|u| (u[0] * u[0] + u[1] * u[1]).sqrt() <= r)
            .count() as f64
            / 1e4;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
    }

    #[test]
    fn config_round_trips() {
        let config = RunConfig::preset("quad20", 9).unwrap();
        let text = config.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), config);
    }

    #[test]
    fn config_validation() {
        let mut config = RunConfig::preset("parabola2d", 1).unwrap();
        assert!(config.validate().is_ok());
        config.refinement.points_per_iteration = 95;
        assert!(matches!(config.validate(), Err(Error::Config { .. })));
        config.refinement.points_per_iteration = 10;
        config.doe.size = 3;
        assert!(config.validate().is_err());
        config.doe.size = 12;
        config.problem = ProblemSpec::named("nope");
        assert!(config.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "seed = 1\n[problem]\nname = \"parabola2d\"\n[doe]\nsize = 12\nshape = 3\n";
        assert!(RunConfig::from_toml(text).is_err());
    }

    #[test]
    fn linear_dimension_override() {
        let spec = ProblemSpec {
            name: "linear".into(),
            beta: Some(2.5),
            dimension: Some(5),
        };
        assert_eq!(
            spec.benchmark().unwrap(),
            Benchmark::Linear {
                beta: 2.5,
                dimension: 5
            }
        );
        let bad = ProblemSpec {
            dimension: Some(3),
            ..ProblemSpec::named("parabola2d")
        };
        assert!(bad.benchmark().is_err());
    }
}
