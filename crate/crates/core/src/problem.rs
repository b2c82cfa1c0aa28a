//! Limit-state problems posed in standard normal space, and the benchmark
//! catalog used for validation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::normal;

type PerformanceFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A performance function `g` over standard normal space. Failure is `g(u) <= 0`.
///
/// Every call to [`LimitState::evaluate`] bumps an atomic counter so that
/// estimators can report the true number of model runs they consumed.
pub struct LimitState {
    name: String,
    dimension: usize,
    func: Arc<PerformanceFn>,
    eval_count: AtomicU64,
}

impl fmt::Debug for LimitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LimitState")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("eval_count", &self.eval_count())
            .finish()
    }
}

impl LimitState {
    pub fn new<F>(name: impl Into<String>, dimension: usize, func: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dimension == 0 {
            return Err(Error::config("problem", "dimension must be positive"));
        }
        Ok(Self {
            name: name.into(),
            dimension,
            func: Arc::new(func),
            eval_count: AtomicU64::new(0),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn eval_count(&self) -> u64 {
        self.eval_count.load(Ordering::SeqCst)
    }

    /// Evaluates `g(x)` and increments the evaluation counter.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_point("problem", self.dimension, x)?;
        self.eval_count.fetch_add(1, Ordering::SeqCst);
        Ok((self.func)(x))
    }

    /// A fresh limit state sharing the same performance function, with its
    /// counter reset to zero.
    pub fn fresh(&self) -> Self {
        Self {
            name: self.name.clone(),
            dimension: self.dimension,
            func: Arc::clone(&self.func),
            eval_count: AtomicU64::new(0),
        }
    }
}

pub(crate) fn check_point(module: &'static str, dimension: usize, x: &[f64]) -> Result<()> {
    if x.len() != dimension {
        return Err(Error::DimensionMismatch {
            module,
            expected: dimension,
            got: x.len(),
        });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::input(
            module,
            format!("coordinate {i} is not finite ({})", x[i]),
        ));
    }
    Ok(())
}

/// The joint standard normal density `φₙ` on ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardGaussianSpace {
    pub dimension: usize,
}

impl StandardGaussianSpace {
    pub fn new(dimension: usize) -> Self {
        Self { dimension }
    }

    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                module: "problem",
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(standard_normal_log_density(x))
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        self.log_density(x).map(f64::exp)
    }
}

/// `-n/2 log(2π) - |x|²/2`, without dimension checks.
pub fn standard_normal_log_density(x: &[f64]) -> f64 {
    let sq: f64 = x.iter().map(|v| v * v).sum();
    -0.5 * x.len() as f64 * (2.0 * PI).ln() - 0.5 * sq
}

/// Catalog entries. Constructed into a [`LimitState`] with [`Benchmark::limit_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Benchmark {
    /// `g(x) = b - x₂ - κ (x₁ - e)²` in two dimensions.
    Parabola { b: f64, kappa: f64, e: f64 },
    /// `g(u) = β - u₁` in `dimension` dimensions; `p_f = Φ(-β)`.
    Linear { beta: f64, dimension: usize },
    /// 20-dimensional smooth limit state, `g(u) = 4 - a·u - 0.15 (c·u)²` with
    /// `a` the normalized all-ones direction and `c` the normalized
    /// alternating-sign direction (`a ⟂ c`).
    Quad20,
}

pub const PARABOLA_DEFAULT: Benchmark = Benchmark::Parabola {
    b: 5.0,
    kappa: 0.5,
    e: 0.1,
};

const QUAD20_DIM: usize = 20;
const QUAD20_B: f64 = 4.0;
const QUAD20_KAPPA: f64 = 0.15;

/// A reference failure probability computed once by crude Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub pf: f64,
    pub cov: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Reference {
    pub fn std_error(&self) -> f64 {
        self.pf * self.cov
    }
}

/// Crude Monte-Carlo reference for the default parabola, 10⁷ samples.
/// Regenerate with `cargo run --release --example calibrate_references`.
pub const PARABOLA_REFERENCE: Reference = Reference {
    pf: 0.0030114,
    cov: 0.005753880966604842,
    samples: 10_000_000,
    seed: REFERENCE_SEED,
};

/// Crude Monte-Carlo reference for `quad20`, 10⁷ samples.
pub const QUAD20_REFERENCE: Reference = Reference {
    pf: 0.0001387,
    cov: 0.026849218490034205,
    samples: 10_000_000,
    seed: REFERENCE_SEED,
};

pub const REFERENCE_SEED: u64 = 20_110_301;

impl Benchmark {
    /// Looks a benchmark up by catalog name. `beta` parameterizes `linear`.
    pub fn from_name(name: &str, beta: Option<f64>) -> Result<Self> {
        match name {
            "parabola2d" => Ok(PARABOLA_DEFAULT),
            "linear" => Ok(Benchmark::Linear {
                beta: beta.unwrap_or(3.0),
                dimension: 2,
            }),
            "quad20" => Ok(Benchmark::Quad20),
            other => Err(Error::config(
                "problem",
                format!("unknown problem `{other}` (expected parabola2d, linear or quad20)"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Parabola { .. } => "parabola2d",
            Benchmark::Linear { .. } => "linear",
            Benchmark::Quad20 => "quad20",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Benchmark::Parabola { .. } => 2,
            Benchmark::Linear { dimension, .. } => *dimension,
            Benchmark::Quad20 => QUAD20_DIM,
        }
    }

    pub fn limit_state(&self) -> LimitState {
        let name = self.name();
        let built = match *self {
            Benchmark::Parabola { b, kappa, e } => LimitState::new(name, 2, move |x: &[f64]| {
                b - x[1] - kappa * (x[0] - e).powi(2)
            }),
            Benchmark::Linear { beta, dimension } => {
                LimitState::new(name, dimension, move |u: &[f64]| beta - u[0])
            }
            Benchmark::Quad20 => LimitState::new(name, QUAD20_DIM, quad20),
        };
        built.expect("catalog dimensions are positive")
    }

    /// Best known failure probability: exact for `linear`, the frozen
    /// Monte-Carlo reference for the other two (default parameters only).
    pub fn reference(&self) -> Option<Reference> {
        match *self {
            Benchmark::Linear { beta, .. } => Some(Reference {
                pf: normal::cdf(-beta),
                cov: 0.0,
                samples: 0,
                seed: 0,
            }),
            b if b == PARABOLA_DEFAULT => Some(PARABOLA_REFERENCE),
            Benchmark::Quad20 => Some(QUAD20_REFERENCE),
            _ => None,
        }
    }
}

fn quad20(u: &[f64]) -> f64 {
    let scale = (QUAD20_DIM as f64).sqrt().recip();
    let mut along = 0.0;
    let mut across = 0.0;
    for (i, v) in u.iter().enumerate() {
        along += v;
        across += if i % 2 == 0 { *v } else { -*v };
    }
    QUAD20_B - scale * along - QUAD20_KAPPA * (scale * across).powi(2)
}

/// The default catalog: `parabola2d`, `linear` (β = 3, n = 2) and `quad20`.
pub fn benchmark_catalog() -> Vec<LimitState> {
    [
        PARABOLA_DEFAULT,
        Benchmark::Linear {
            beta: 3.0,
            dimension: 2,
        },
        Benchmark::Quad20,
    ]
    .iter()
    .map(Benchmark::limit_state)
    .collect()
}
