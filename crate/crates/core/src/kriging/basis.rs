use serde::{Deserialize, Serialize};

/// Regression basis `f(x)` of the kriging trend `f(x)ᵀβ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressionBasis {
    /// `f(x) = 1` (ordinary kriging).
    #[default]
    Constant,
    /// `f(x) = (1, x₁, …, xₙ)` (universal kriging with a linear trend).
    Linear,
}

impl RegressionBasis {
    pub fn size(&self, dimension: usize) -> usize {
        match self {
            RegressionBasis::Constant => 1,
            RegressionBasis::Linear => dimension + 1,
        }
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        if let RegressionBasis::Linear = self {
            out[1..].copy_from_slice(x);
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size(x.len())];
        self.eval_into(x, &mut out);
        out
    }
}
