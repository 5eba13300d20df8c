//! Step 2: the head as a mixture of consecutively truncated geometrics with a
//! shared parameter `p_a = γ/(ℒ + γ)`.

use serde::{Deserialize, Serialize};

use crate::closed_form::MixtureIndexing;
use crate::error::{Error, Result};
use crate::histogram::DegreeHistogram;

/// Relative RMSE gain below which another mixture component is not worth it.
pub const HEAD_IMPROVEMENT_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadFit {
    /// Mixture weights `p_1⁰, p_2⁰, …`; the last entry is the remainder.
    pub weights: Vec<f64>,
    pub p_a: f64,
    pub indexing: MixtureIndexing,
    /// Set when the least-squares weights left the simplex and were clipped.
    pub clipped: bool,
}

impl HeadFit {
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn prob(&self, k: u64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * component(self.p_a, i as u64 + 1, k, self.indexing))
            .sum()
    }
}

/// Geometric component `i` (1-based) at degree `k`.
fn component(p_a: f64, i: u64, k: u64, indexing: MixtureIndexing) -> f64 {
    let start = match indexing {
        MixtureIndexing::Inclusive => i,
        MixtureIndexing::Exclusive => i + 1,
    };
    if k < start {
        0.0
    } else {
        p_a * (1.0 - p_a).powf((k - i) as f64)
    }
}

/// Solves the small symmetric system `A x = b` by Gaussian elimination with
/// partial pivoting. `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|x, y| a[*x][col].abs().total_cmp(&a[*y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Weights for `j` free components plus a remainder on component `j + 1`,
/// and the resulting RMSE over the head bins.
fn fit_stage(ks: &[u64], ys: &[f64], p_a: f64, j: usize, indexing: MixtureIndexing) -> Option<(Vec<f64>, f64)> {
    let rest = |k| component(p_a, j as u64 + 1, k, indexing);
    let basis: Vec<Vec<f64>> = ks
        .iter()
        .map(|&k| (1..=j as u64).map(|i| component(p_a, i, k, indexing) - rest(k)).collect())
        .collect();
    let target: Vec<f64> = ks.iter().zip(ys).map(|(&k, y)| y - rest(k)).collect();
    let mut ata = vec![vec![0.0; j]; j];
    let mut atb = vec![0.0; j];
    for (row, t) in basis.iter().zip(&target) {
        for r in 0..j {
            atb[r] += row[r] * t;
            for c in 0..j {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let free = solve(ata, atb)?;
    let mut w = free.clone();
    w.push(1.0 - free.iter().sum::<f64>());
    let sse: f64 = basis
        .iter()
        .zip(&target)
        .map(|(row, t)| (row.iter().zip(&free).map(|(a, x)| a * x).sum::<f64>() - t).powi(2))
        .sum();
    Some((w, (sse / ks.len() as f64).sqrt()))
}

/// Projects onto the probability simplex by clipping negatives and rescaling.
fn clip_to_simplex(w: &mut [f64]) -> bool {
    let clipped = w.iter().any(|x| !(0.0..=1.0).contains(x));
    if clipped {
        w.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            w.iter_mut().for_each(|x| *x /= s);
        } else {
            w[0] = 1.0;
        }
    }
    clipped
}

/// Fits the head on `[1, lower]` with `p_a = γ/(lower + γ)`, adding mixture
/// components one at a time until the relative RMSE gain drops below
/// [`HEAD_IMPROVEMENT_TOL`] or `max_head_params` free weights are in use.
/// A lower boundary below 2 leaves no head to fit.
pub fn fit_head(
    hist: &DegreeHistogram,
    gamma: f64,
    lower: u64,
    max_head_params: usize,
    indexing: MixtureIndexing,
) -> Result<HeadFit> {
    if max_head_params < 1 {
        return Err(Error::Config("max_head_params must be at least 1".into()));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Fit(format!("head needs a positive exponent, got {gamma}")));
    }
    let p_a = gamma / (lower as f64 + gamma);
    if lower < 2 {
        return Ok(HeadFit {
            weights: Vec::new(),
            p_a,
            indexing,
            clipped: false,
        });
    }
    let ks: Vec<u64> = (1..=lower).collect();
    let ys: Vec<f64> = ks.iter().map(|k| hist.prob(*k)).collect();
    // the remainder component must still touch the head
    let max_j = max_head_params.min(lower as usize - 1).max(1);
    let (mut weights, mut err) =
        fit_stage(&ks, &ys, p_a, 1, indexing).ok_or_else(|| Error::Fit("singular head system".into()))?;
    for j in 2..=max_j {
        let Some((w, e)) = fit_stage(&ks, &ys, p_a, j, indexing) else { break };
        let gain = if err > 0.0 { (err - e) / err } else { 0.0 };
        if gain < HEAD_IMPROVEMENT_TOL {
            break;
        }
        weights = w;
        err = e;
    }
    let clipped = clip_to_simplex(&mut weights);
    Ok(HeadFit {
        weights,
        p_a,
        indexing,
        clipped,
    })
}
