//! Step 3: geometric tail `c · p_b (1 − p_b)^{k−1}` with `p_b = γ/(𝒰 + γ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::DegreeHistogram;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// `None` when the tail held fewer than two occupied bins.
    pub c: Option<f64>,
    pub p_b: f64,
}

impl TailFit {
    pub fn skipped(&self) -> bool {
        self.c.is_none()
    }

    pub fn prob(&self, k: u64) -> Option<f64> {
        self.c
            .map(|c| c * self.p_b * (1.0 - self.p_b).powf(k as f64 - 1.0))
    }
}

/// Least squares in log space for `c` over the occupied bins of
/// `[upper, k_max]`, which reduces to the mean log residual.
pub fn fit_tail(hist: &DegreeHistogram, gamma: f64, upper: u64) -> Result<TailFit> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Fit(format!("tail needs a positive exponent, got {gamma}")));
    }
    let p_b = gamma / (upper as f64 + gamma);
    let total = hist.total() as f64;
    let resid: Vec<f64> = hist
        .counts()
        .range(upper..)
        .map(|(k, n)| (*n as f64 / total).ln() - p_b.ln() - (*k as f64 - 1.0) * (1.0 - p_b).ln())
        .collect();
    let c = (resid.len() >= 2).then(|| (resid.iter().sum::<f64>() / resid.len() as f64).exp());
    Ok(TailFit { c, p_b })
}
