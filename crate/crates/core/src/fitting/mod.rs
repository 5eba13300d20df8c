//! Three-step trichotomy fit of a degree histogram: power-law middle by
//! log-log least squares with boundary search, truncated-geometric head,
//! geometric tail; plus a single power-law baseline for comparison.

mod head;
mod segment;
mod tail;

use serde::{Deserialize, Serialize};

use crate::closed_form::MixtureIndexing;
use crate::error::{Error, Result};
use crate::histogram::DegreeHistogram;
use crate::stats::ols;

pub use head::{fit_head, HeadFit, HEAD_IMPROVEMENT_TOL};
pub use segment::{fit_power_law_segment, fit_segment, PowerLawSegment, MIN_SEGMENT_POINTS};
pub use tail::{fit_tail, TailFit};

/// How the fitted slope magnitude turns into the γ used by head and tail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaConvention {
    /// γ is the slope magnitude itself.
    #[default]
    Literal,
    /// γ is the slope magnitude minus one (exponent `−(γ + 1)`).
    Theorem,
}

impl GammaConvention {
    pub fn gamma_from_slope(self, slope_magnitude: f64) -> f64 {
        match self {
            GammaConvention::Literal => slope_magnitude,
            GammaConvention::Theorem => slope_magnitude - 1.0,
        }
    }
}

impl std::str::FromStr for GammaConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(GammaConvention::Literal),
            "theorem" => Ok(GammaConvention::Theorem),
            other => Err(format!("unknown gamma convention {other:?} (literal|theorem)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Starting boundaries; `None` picks them from the support.
    pub initial_lower: Option<u64>,
    pub initial_upper: Option<u64>,
    /// When false the initial boundaries are used as given.
    pub search_boundaries: bool,
    pub max_head_params: usize,
    pub gamma_convention: GammaConvention,
    pub head_indexing: MixtureIndexing,
    pub dataset: Option<String>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            initial_lower: None,
            initial_upper: None,
            search_boundaries: true,
            max_head_params: 1,
            gamma_convention: GammaConvention::Literal,
            head_indexing: MixtureIndexing::Inclusive,
            dataset: None,
        }
    }
}

/// Root mean squared difference; both slices must cover the same bins.
pub fn rmse(fitted: &[f64], empirical: &[f64]) -> Result<f64> {
    if fitted.len() != empirical.len() {
        return Err(Error::SupportMismatch {
            left: fitted.len(),
            right: empirical.len(),
        });
    }
    if fitted.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(crate::stats::rmse_slices(fitted, empirical))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurePowerLaw {
    pub amplitude: f64,
    pub gamma: f64,
    pub rmse: f64,
}

impl PurePowerLaw {
    pub fn prob(&self, k: u64) -> f64 {
        self.amplitude * (k as f64).powf(-self.gamma)
    }
}

/// One log-log line through every occupied bin (degree 0 excluded), scored
/// by linear-space RMSE over the same bins.
pub fn fit_pure_power_law(hist: &DegreeHistogram) -> Result<PurePowerLaw> {
    let occupied: Vec<(u64, f64)> = hist.occupied().filter(|(k, _)| *k > 0).collect();
    if occupied.len() < MIN_SEGMENT_POINTS {
        return Err(Error::Fit(format!(
            "power-law baseline needs {MIN_SEGMENT_POINTS} occupied bins, got {}",
            occupied.len()
        )));
    }
    let pts: Vec<(f64, f64)> = occupied.iter().map(|(k, p)| ((*k as f64).ln(), p.ln())).collect();
    let line = ols(&pts).ok_or_else(|| Error::Fit("degenerate power-law baseline".into()))?;
    let mut fit = PurePowerLaw {
        amplitude: line.intercept.exp(),
        gamma: -line.slope,
        rmse: 0.0,
    };
    let fitted: Vec<f64> = occupied.iter().map(|(k, _)| fit.prob(*k)).collect();
    let emp: Vec<f64> = occupied.iter().map(|(_, p)| *p).collect();
    fit.rmse = rmse(&fitted, &emp)?;
    Ok(fit)
}

/// Initial boundaries at the first and second thirds of the log-degree range,
/// nudged apart so the segment holds enough occupied bins.
pub fn default_initial_boundaries(hist: &DegreeHistogram) -> Result<(u64, u64)> {
    let degrees: Vec<u64> = hist.counts().keys().copied().filter(|k| *k > 0).collect();
    if degrees.len() < MIN_SEGMENT_POINTS {
        return Err(Error::Fit(format!(
            "need {MIN_SEGMENT_POINTS} occupied bins for a segment, got {}",
            degrees.len()
        )));
    }
    let (lo, hi) = (degrees[0] as f64, *degrees.last().unwrap() as f64);
    let at = |frac: f64| (lo * (hi / lo).powf(frac)).round() as u64;
    let mut i = degrees.partition_point(|k| *k < at(1.0 / 3.0));
    let mut j = degrees.partition_point(|k| *k <= at(2.0 / 3.0)).saturating_sub(1);
    while j < i + MIN_SEGMENT_POINTS - 1 {
        i = i.saturating_sub(1);
        if j < i + MIN_SEGMENT_POINTS - 1 && j + 1 < degrees.len() {
            j += 1;
        }
    }
    Ok((degrees[i], degrees[j]))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseRmse {
    pub head: Option<f64>,
    pub middle: Option<f64>,
    pub tail: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub dataset: Option<String>,
    pub lower: u64,
    pub upper: u64,
    /// Fitted log-log slope of the middle segment (negative).
    pub exponent: f64,
    pub amplitude: f64,
    pub gamma_convention: GammaConvention,
    /// γ fed to the head and tail parameters.
    pub gamma: f64,
    pub head: HeadFit,
    pub tail: TailFit,
    pub k_max: u64,
    pub rmse_trichotomy: f64,
    pub rmse_power_law_only: f64,
    pub per_phase_rmse: PhaseRmse,
    pub power_law_baseline: PurePowerLaw,
    #[serde(default)]
    pub warnings: Vec<String>,
}

pub const CSV_HEADER: &str = "dataset,L,U,exponent,rmse_ours,rmse_pl";

impl FitReport {
    /// The stitched model: head on `[1, ℒ]`, power law on `(ℒ, 𝒰]`, tail
    /// beyond. An empty head or skipped tail hands its range to the power law.
    pub fn fitted_prob(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        if k <= self.lower && !self.head.is_empty() {
            return self.head.prob(k);
        }
        if k > self.upper {
            if let Some(p) = self.tail.prob(k) {
                return p;
            }
        }
        self.amplitude * (k as f64).powf(self.exponent)
    }

    pub fn rmse_ratio(&self) -> f64 {
        self.rmse_trichotomy / self.rmse_power_law_only
    }

    /// One row under [`CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        let name = self.dataset.as_deref().unwrap_or("");
        let name = if name.contains([',', '"', '\n']) {
            format!("\"{}\"", name.replace('"', "\"\""))
        } else {
            name.to_string()
        };
        format!(
            "{name},{},{},{},{},{}",
            self.lower,
            self.upper,
            fmt_g9(self.exponent),
            fmt_g9(self.rmse_trichotomy),
            fmt_g9(self.rmse_power_law_only)
        )
    }
}

/// Nine significant digits, trailing zeros trimmed.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        let s = format!("{x:.8e}");
        let (m, e) = s.split_once('e').unwrap();
        let m = m.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Runs Steps 1 to 3 and scores the stitched fit against the histogram's
/// occupied bins.
pub fn fit_trichotomy(hist: &DegreeHistogram, config: &FitConfig) -> Result<FitReport> {
    if hist.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (l0, u0) = match (config.initial_lower, config.initial_upper) {
        (Some(l), Some(u)) => (l, u),
        (l, u) => {
            let (dl, du) = default_initial_boundaries(hist)?;
            (l.unwrap_or(dl), u.unwrap_or(du))
        }
    };
    let seg = if config.search_boundaries {
        fit_power_law_segment(hist, l0, u0)?
    } else {
        fit_segment(hist, l0, u0)?
    };
    let gamma = config.gamma_convention.gamma_from_slope(seg.gamma_fit);
    let mut warnings = Vec::new();
    if !(gamma > 0.0) {
        return Err(Error::Fit(format!(
            "fitted slope {:.4} gives non-positive γ under the {:?} convention",
            -seg.gamma_fit, config.gamma_convention
        )));
    }
    let head = fit_head(hist, gamma, seg.lower, config.max_head_params, config.head_indexing)?;
    if head.clipped {
        warnings.push("head mixture weights left [0, 1] and were clipped".into());
    }
    let tail = fit_tail(hist, gamma, seg.upper)?;
    if tail.skipped() {
        warnings.push(format!("tail beyond {} too sparse; fit skipped", seg.upper));
    }
    let baseline = fit_pure_power_law(hist)?;
    let mut report = FitReport {
        dataset: config.dataset.clone(),
        lower: seg.lower,
        upper: seg.upper,
        exponent: -seg.gamma_fit,
        amplitude: seg.amplitude,
        gamma_convention: config.gamma_convention,
        gamma,
        head,
        tail,
        k_max: hist.k_max().unwrap_or(0),
        rmse_trichotomy: 0.0,
        rmse_power_law_only: baseline.rmse,
        per_phase_rmse: PhaseRmse::default(),
        power_law_baseline: baseline,
        warnings,
    };
    let bins: Vec<(u64, f64)> = hist.occupied().filter(|(k, _)| *k > 0).collect();
    let phase_rmse = |range: &dyn Fn(u64) -> bool| -> Option<f64> {
        let (f, e): (Vec<f64>, Vec<f64>) = bins
            .iter()
            .filter(|(k, _)| range(*k))
            .map(|(k, p)| (report.fitted_prob(*k), *p))
            .unzip();
        rmse(&f, &e).ok()
    };
    let (lower, upper) = (report.lower, report.upper);
    let overall = phase_rmse(&|_| true).ok_or(Error::EmptyInput)?;
    let phases = PhaseRmse {
        head: phase_rmse(&|k| k <= lower),
        middle: phase_rmse(&|k| k > lower && k <= upper),
        tail: phase_rmse(&|k| k > upper),
    };
    report.rmse_trichotomy = overall;
    report.per_phase_rmse = phases;
    Ok(report)
}
