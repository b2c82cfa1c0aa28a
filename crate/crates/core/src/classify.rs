//! Probabilistic classification from a Gaussian prediction, and the margin
//! of uncertainty around the predicted limit state.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::surrogate::{Prediction, Surrogate};

/// Φ⁻¹(0.975).
pub const DEFAULT_MARGIN_K: f64 = 1.959_963_984_540_054;

/// Predictions with `std <= SIGMA_FLOOR * σ_G` are treated as noiseless.
pub const SIGMA_FLOOR: f64 = 1e-12;

/// Confidence multiplier `k` defining the margin `-kσ <= Ĝ <= kσ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MarginSpec {
    k: f64,
}

impl MarginSpec {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::config(
                "classify",
                format!("margin k must be > 0, got {k}"),
            ));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

impl Default for MarginSpec {
    fn default() -> Self {
        Self {
            k: DEFAULT_MARGIN_K,
        }
    }
}

impl TryFrom<f64> for MarginSpec {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

impl From<MarginSpec> for f64 {
    fn from(spec: MarginSpec) -> f64 {
        spec.k
    }
}

fn is_noiseless(pred: &Prediction, process_std: f64) -> bool {
    pred.std <= SIGMA_FLOOR * process_std
}

/// `P[Ĝ(x) <= 0] = Φ(-μ/σ)`; the indicator `μ <= 0` below the σ floor.
pub fn failure_probability(pred: &Prediction, process_std: f64) -> f64 {
    if is_noiseless(pred, process_std) {
        if pred.mean <= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        normal::cdf(-pred.mean / pred.std)
    }
}

/// `P[Ĝ(x) > 0]`, computed from the mirrored tail rather than as a complement.
pub fn safe_probability(pred: &Prediction, process_std: f64) -> f64 {
    if is_noiseless(pred, process_std) {
        if pred.mean <= 0.0 {
            0.0
        } else {
            1.0
        }
    } else {
        normal::cdf(pred.mean / pred.std)
    }
}

/// `Φ(k - μ/σ) - Φ(-k - μ/σ)`; zero below the σ floor.
pub fn margin_probability(pred: &Prediction, process_std: f64, spec: MarginSpec) -> f64 {
    if is_noiseless(pred, process_std) {
        return 0.0;
    }
    // the expression is even in μ; evaluating it with -|μ| keeps both terms in
    // the lower tail, where Φ is accurate
    let t = (pred.mean / pred.std).abs();
    (normal::cdf(spec.k - t) - normal::cdf(-spec.k - t)).max(0.0)
}

pub fn prob_failure<S: Surrogate + ?Sized>(model: &S, x: &[f64]) -> Result<f64> {
    Ok(failure_probability(&model.predict(x)?, model.process_std()))
}

pub fn prob_safe<S: Surrogate + ?Sized>(model: &S, x: &[f64]) -> Result<f64> {
    Ok(safe_probability(&model.predict(x)?, model.process_std()))
}

pub fn prob_in_margin<S: Surrogate + ?Sized>(
    model: &S,
    x: &[f64],
    spec: MarginSpec,
) -> Result<f64> {
    Ok(margin_probability(
        &model.predict(x)?,
        model.process_std(),
        spec,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Fail,
    Safe,
}

/// Deterministic classification by the sign of the mean; `μ = 0` fails.
pub fn mean_sign_classify<S: Surrogate + ?Sized>(model: &S, x: &[f64]) -> Result<Classification> {
    let pred = model.predict(x)?;
    Ok(if pred.mean <= 0.0 {
        Classification::Fail
    } else {
        Classification::Safe
    })
}

/// Writes `x1,x2,mu,sigma,prob_failure,prob_in_margin` on a regular
/// `resolution × resolution` grid over `[lower, upper]²` (two-dimensional
/// surrogates only).
pub fn write_grid_csv<S: Surrogate + ?Sized, W: Write>(
    model: &S,
    spec: MarginSpec,
    lower: f64,
    upper: f64,
    resolution: usize,
    writer: W,
) -> Result<()> {
    if model.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            module: "classify",
            expected: 2,
            got: model.dimension(),
        });
    }
    if resolution < 2 || !(upper > lower) {
        return Err(Error::config(
            "classify",
            "grid needs resolution >= 2 and upper > lower",
        ));
    }
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["x1", "x2", "mu", "sigma", "prob_failure", "prob_in_margin"])?;
    let step = (upper - lower) / (resolution - 1) as f64;
    let sigma_g = model.process_std();
    for i in 0..resolution {
        for j in 0..resolution {
            let x = [lower + i as f64 * step, lower + j as f64 * step];
            let pred = model.predict(&x)?;
            csv.write_record(&[
                x[0].to_string(),
                x[1].to_string(),
                pred.mean.to_string(),
                pred.std.to_string(),
                failure_probability(&pred, sigma_g).to_string(),
                margin_probability(&pred, sigma_g, spec).to_string(),
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}
