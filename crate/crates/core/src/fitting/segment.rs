//! Step 1: log-log least squares on the middle segment with greedy
//! boundary search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::DegreeHistogram;
use crate::stats::{ols, LineFit};

/// Least-squares line `log p = log a − γ log k` over `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSegment {
    pub lower: u64,
    pub upper: u64,
    pub amplitude: f64,
    /// Magnitude of the fitted log-log slope.
    pub gamma_fit: f64,
    pub mse: f64,
}

/// Fewest occupied bins a segment may hold.
pub const MIN_SEGMENT_POINTS: usize = 3;

/// MSE differences at or below this count as ties (round-off level for
/// log-probabilities).
const TIE_TOL: f64 = 1e-12;

fn width(s: &PowerLawSegment) -> u64 {
    s.upper - s.lower
}

/// Prefers lower MSE; on a tie, the wider segment.
fn improves(cand: &PowerLawSegment, best: &PowerLawSegment) -> bool {
    cand.mse < best.mse - TIE_TOL || (cand.mse <= best.mse + TIE_TOL && width(cand) > width(best))
}

fn log_points(hist: &DegreeHistogram, lower: u64, upper: u64) -> Vec<(f64, f64)> {
    hist.counts()
        .range(lower..=upper)
        .filter(|(k, _)| **k > 0)
        .map(|(k, c)| ((*k as f64).ln(), (*c as f64 / hist.total() as f64).ln()))
        .collect()
}

/// Fits one fixed segment; zero-count bins (and degree 0) are skipped.
pub fn fit_segment(hist: &DegreeHistogram, lower: u64, upper: u64) -> Result<PowerLawSegment> {
    if lower >= upper {
        return Err(Error::Fit(format!("empty segment [{lower}, {upper}]")));
    }
    let pts = log_points(hist, lower, upper);
    if pts.len() < MIN_SEGMENT_POINTS {
        return Err(Error::Fit(format!(
            "segment [{lower}, {upper}] has {} occupied bins, need {MIN_SEGMENT_POINTS}",
            pts.len()
        )));
    }
    let LineFit { slope, intercept, sse } =
        ols(&pts).ok_or_else(|| Error::Fit(format!("degenerate segment [{lower}, {upper}]")))?;
    Ok(PowerLawSegment {
        lower,
        upper,
        amplitude: intercept.exp(),
        gamma_fit: -slope,
        mse: sse / pts.len() as f64,
    })
}

/// Walks one boundary in one direction while the MSE improves (or ties
/// while widening).
fn walk(
    hist: &DegreeHistogram,
    start: PowerLawSegment,
    next: impl Fn(&PowerLawSegment) -> Option<(u64, u64)>,
) -> PowerLawSegment {
    let mut best = start;
    while let Some((lo, hi)) = next(&best) {
        match fit_segment(hist, lo, hi) {
            Ok(cand) if improves(&cand, &best) => best = cand,
            _ => break,
        }
    }
    best
}

fn better(a: PowerLawSegment, b: PowerLawSegment) -> PowerLawSegment {
    if improves(&b, &a) {
        b
    } else {
        a
    }
}

/// Starting from `[lower0, upper0]`, moves the lower boundary down one
/// degree at a time while the MSE improves, then separately up, keeping the
/// better end point; then does the same for the upper boundary.
pub fn fit_power_law_segment(
    hist: &DegreeHistogram,
    lower0: u64,
    upper0: u64,
) -> Result<PowerLawSegment> {
    let (k_min, k_max) = match (hist.k_min(), hist.k_max()) {
        (Some(a), Some(b)) => (a.max(1), b),
        _ => return Err(Error::EmptyInput),
    };
    if lower0 < k_min || upper0 > k_max {
        return Err(Error::Fit(format!(
            "initial segment [{lower0}, {upper0}] outside support [{k_min}, {k_max}]"
        )));
    }
    let start = fit_segment(hist, lower0, upper0)?;

    let down = walk(hist, start, |s| (s.lower > k_min.max(1)).then(|| (s.lower - 1, s.upper)));
    let up = walk(hist, start, |s| (s.lower + 1 < s.upper).then(|| (s.lower + 1, s.upper)));
    let after_lower = better(down, up);

    let down = walk(hist, after_lower, |s| {
        (s.upper > s.lower + 1).then(|| (s.lower, s.upper - 1))
    });
    let up = walk(hist, after_lower, |s| (s.upper < k_max).then(|| (s.lower, s.upper + 1)));
    Ok(better(up, down))
}
