//! The probabilistic-prediction interface consumed by classification,
//! refinement and estimation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian predictive distribution at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub mean: f64,
    /// Always non-negative.
    pub std: f64,
}

/// Anything that yields a Gaussian prediction of the performance function.
pub trait Surrogate: Sync {
    fn dimension(&self) -> usize;

    fn predict(&self, x: &[f64]) -> Result<Prediction>;

    /// Process standard deviation σ_G; sets the scale of the σ floor used by
    /// the classification functions.
    fn process_std(&self) -> f64;
}

impl<S: Surrogate + ?Sized> Surrogate for &S {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        (**self).predict(x)
    }
    fn process_std(&self) -> f64 {
        (**self).process_std()
    }
}

/// A surrogate defined by a closure returning `(mean, std)`.
///
/// Mostly useful for synthetic tests: a zero-std surrogate equal to `g`
/// collapses the probabilistic classification onto the failure indicator.
pub struct FnSurrogate<F> {
    dimension: usize,
    process_std: f64,
    func: F,
}

impl<F> FnSurrogate<F>
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    pub fn new(dimension: usize, process_std: f64, func: F) -> Self {
        Self {
            dimension,
            process_std,
            func,
        }
    }
}

/// A noiseless surrogate that predicts `g` exactly.
pub fn exact_surrogate<G>(
    dimension: usize,
    g: G,
) -> FnSurrogate<impl Fn(&[f64]) -> (f64, f64) + Sync>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    FnSurrogate::new(dimension, 0.0, move |x: &[f64]| (g(x), 0.0))
}

impl<F> Surrogate for FnSurrogate<F>
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                module: "kriging",
                expected: self.dimension,
                got: x.len(),
            });
        }
        let (mean, std) = (self.func)(x);
        Ok(Prediction {
            mean,
            std: std.max(0.0),
        })
    }

    fn process_std(&self) -> f64 {
        self.process_std
    }
}
