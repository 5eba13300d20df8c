//! Closed-form degree distributions: the Poisson, exponential and power-law
//! collapses of the model, their truncated-mixture generalizations, and the
//! three-regime (geometric head, power-law middle, geometric tail) law.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::{validate_probability_vector, Bound, GammaExponent, ModelParams};
use crate::residential::ResidentialTimeSpec;

/// Which index convention the truncated-geometric mixture uses.
///
/// `Exclusive` sums components `i = 1..k−1` (the printed form; its total mass
/// is `1/2`), `Inclusive` sums `i = 1..k` and is a proper pmf that reduces to
/// `geom(1/2)` when all weight sits on the first component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixtureIndexing {
    Exclusive,
    #[default]
    Inclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PmfSource {
    Poisson {
        mean: f64,
    },
    ExpNetwork,
    TruncGeomMixture {
        init_probs: Vec<f64>,
        indexing: MixtureIndexing,
    },
    BaPowerLaw,
    TruncPowerLawMixture {
        init_probs: Vec<f64>,
    },
    Trichotomy {
        params: ModelParams,
        gamma: f64,
        network_size: u64,
    },
    MasterEquation {
        params: ModelParams,
        residential: ResidentialTimeSpec,
    },
}

/// A pmf evaluated on the contiguous degree range `k_min..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormPmf {
    k_min: u64,
    probabilities: Vec<f64>,
    source: PmfSource,
}

impl ClosedFormPmf {
    pub(crate) fn from_parts(k_min: u64, probabilities: Vec<f64>, source: PmfSource) -> Self {
        ClosedFormPmf {
            k_min,
            probabilities,
            source,
        }
    }

    pub fn poisson(mean: f64, k_max: u64) -> Result<Self> {
        check_mean(mean)?;
        let probs = (0..=k_max).map(|k| poisson_unchecked(k, mean)).collect();
        Ok(Self::from_parts(0, probs, PmfSource::Poisson { mean }))
    }

    pub fn exp_network(k_max: u64) -> Result<Self> {
        check_k_min(k_max, 1)?;
        let probs = (1..=k_max).map(exp_unchecked).collect();
        Ok(Self::from_parts(1, probs, PmfSource::ExpNetwork))
    }

    pub fn trunc_geom_mixture(
        init_probs: &[f64],
        indexing: MixtureIndexing,
        k_max: u64,
    ) -> Result<Self> {
        check_k_min(k_max, 1)?;
        validate_probability_vector(init_probs).map_err(Error::Parameter)?;
        let probs = (1..=k_max)
            .map(|k| trunc_geom_unchecked(k, init_probs, indexing))
            .collect();
        Ok(Self::from_parts(
            1,
            probs,
            PmfSource::TruncGeomMixture {
                init_probs: init_probs.to_vec(),
                indexing,
            },
        ))
    }

    pub fn ba_power_law(k_max: u64) -> Result<Self> {
        check_k_min(k_max, 1)?;
        let probs = (1..=k_max).map(ba_unchecked).collect();
        Ok(Self::from_parts(1, probs, PmfSource::BaPowerLaw))
    }

    pub fn trunc_power_law_mixture(init_probs: &[f64], k_max: u64) -> Result<Self> {
        check_k_min(k_max, 1)?;
        validate_probability_vector(init_probs).map_err(Error::Parameter)?;
        let probs = (1..=k_max)
            .map(|k| trunc_power_law_unchecked(k, init_probs))
            .collect();
        Ok(Self::from_parts(
            1,
            probs,
            PmfSource::TruncPowerLawMixture {
                init_probs: init_probs.to_vec(),
            },
        ))
    }

    /// The normalized three-regime law on `1..=network_size`.
    pub fn trichotomy(params: &ModelParams, gamma: GammaExponent, network_size: u64) -> Result<Self> {
        GammaExponent::new(gamma.value(), params)?;
        Self::trichotomy_unbracketed(params, gamma.value(), network_size)
    }

    /// Same closed form with γ taken as any positive real, skipping the
    /// `[L, L + 1]` bracket. Used to synthesize targets in the fitting model
    /// space, where the fitted exponent is not tied to the lower bound.
    pub fn trichotomy_unbracketed(params: &ModelParams, gamma: f64, network_size: u64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Parameter(format!("γ must be positive, got {gamma}")));
        }
        if network_size < 1 {
            return Err(Error::Parameter("network size must be at least 1".into()));
        }
        let logs: Vec<f64> = (1..=network_size)
            .map(|k| trichotomy_log_weight(k, params, gamma))
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self::from_parts(
            1,
            probs,
            PmfSource::Trichotomy {
                params: params.clone(),
                gamma,
                network_size,
            },
        ))
    }

    pub fn k_min(&self) -> u64 {
        self.k_min
    }

    pub fn k_max(&self) -> u64 {
        self.k_min + self.probabilities.len() as u64 - 1
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn source(&self) -> &PmfSource {
        &self.source
    }

    /// Probability of degree `k`; zero outside the evaluated range.
    pub fn prob(&self, k: u64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        self.probabilities
            .get((k - self.k_min) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.k_min + i as u64, *p))
    }

    /// Dense vector indexed by degree starting at 0.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.k_min as usize];
        v.extend_from_slice(&self.probabilities);
        v
    }
}

fn check_mean(mean: f64) -> Result<()> {
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::Parameter(format!("Poisson mean must be positive, got {mean}")));
    }
    Ok(())
}

fn check_k_min(k: u64, min: u64) -> Result<()> {
    if k < min {
        return Err(Error::Domain(format!("degree {k} below support minimum {min}")));
    }
    Ok(())
}

fn poisson_unchecked(k: u64, mean: f64) -> f64 {
    let kf = k as f64;
    (kf * mean.ln() - mean - ln_gamma(kf + 1.0)).exp()
}

fn exp_unchecked(k: u64) -> f64 {
    0.5f64.powi(k.min(i32::MAX as u64) as i32)
}

fn trunc_geom_unchecked(k: u64, init_probs: &[f64], indexing: MixtureIndexing) -> f64 {
    let last = match indexing {
        MixtureIndexing::Exclusive => k.saturating_sub(1),
        MixtureIndexing::Inclusive => k,
    };
    (1..=last.min(init_probs.len() as u64))
        .map(|i| init_probs[(i - 1) as usize] * 0.5 * 0.5f64.powf((k - i) as f64))
        .sum()
}

fn ba_unchecked(k: u64) -> f64 {
    let k = k as f64;
    4.0 / (k * (k + 1.0) * (k + 2.0))
}

/// `Π_{j=i}^{k−1} j/(j+3)` telescopes to `i(i+1)(i+2) / (k(k+1)(k+2))`.
fn trunc_power_law_unchecked(k: u64, init_probs: &[f64]) -> f64 {
    let kf = k as f64;
    let denom = kf * (kf + 1.0) * (kf + 2.0);
    (1..=k.min(init_probs.len() as u64))
        .map(|i| {
            let fi = i as f64;
            init_probs[(i - 1) as usize] * (2.0 / (2.0 + fi)) * fi * (fi + 1.0) * (fi + 2.0) / denom
        })
        .sum()
}

/// Log of the unnormalized three-regime weight at degree `k ≥ 1`.
///
/// The middle branch carries `γ/ℒ` so that it continues the head at `k = ℒ + 1`
/// through the transition rate `L/(γ + ℒ + 1)`; with `L = ℒ` this is the usual
/// `γ/L` prefactor. The tail continues from `p_𝒰` at rate `k̂(𝒰)/(γ + U)`.
pub(crate) fn trichotomy_log_weight(k: u64, params: &ModelParams, gamma: f64) -> f64 {
    let l = params.lower_bound() as f64;
    let ll = params.lower_threshold();
    let head = |k: u64| gamma.ln() - (gamma + l).ln() + (k as f64 - 1.0) * (l / (gamma + l)).ln();
    let middle = |k: u64| {
        let llf = ll as f64;
        let kf = k as f64;
        gamma.ln() - llf.ln() + ln_gamma(kf) - ln_gamma(llf) + ln_gamma(gamma + llf + 1.0)
            - ln_gamma(kf + gamma + 1.0)
            + llf * (l / (gamma + l)).ln()
    };
    let body = |k: u64| if k <= ll { head(k) } else { middle(k) };
    match (params.upper_threshold(), params.upper_bound()) {
        (Bound::Finite(uu), Bound::Finite(u)) if k > uu => {
            let u = u as f64;
            body(uu) + (params.modified_degree(uu) as f64).ln() - (gamma + u).ln()
                + (k - uu - 1) as f64 * (u / (gamma + u)).ln()
        }
        _ => body(k),
    }
}

/// `mean^k e^{−mean} / k!`, evaluated in log space.
pub fn poisson_network_pmf(k: u64, mean: f64) -> Result<f64> {
    check_mean(mean)?;
    Ok(poisson_unchecked(k, mean))
}

/// `2^{−k}` for `k ≥ 1`.
pub fn exp_network_pmf(k: u64) -> Result<f64> {
    check_k_min(k, 1)?;
    Ok(exp_unchecked(k))
}

/// Mixture of consecutively truncated `geom(1/2)` components weighted by the
/// initial-connection probabilities (index 0 holds `p_1(0)`).
pub fn trunc_geom_mixture_pmf(k: u64, init_probs: &[f64], indexing: MixtureIndexing) -> Result<f64> {
    check_k_min(k, 1)?;
    validate_probability_vector(init_probs).map_err(Error::Parameter)?;
    Ok(trunc_geom_unchecked(k, init_probs, indexing))
}

/// `4 / (k(k+1)(k+2))`.
pub fn ba_power_law_pmf(k: u64) -> Result<f64> {
    check_k_min(k, 1)?;
    Ok(ba_unchecked(k))
}

pub fn trunc_power_law_mixture_pmf(k: u64, init_probs: &[f64]) -> Result<f64> {
    check_k_min(k, 1)?;
    validate_probability_vector(init_probs).map_err(Error::Parameter)?;
    Ok(trunc_power_law_unchecked(k, init_probs))
}

/// Single-degree evaluation of the normalized three-regime law. Builds the
/// whole pmf to get the normalization constant; use
/// [`ClosedFormPmf::trichotomy`] when evaluating many degrees.
pub fn trichotomy_pmf(
    k: u64,
    params: &ModelParams,
    gamma: GammaExponent,
    network_size: u64,
) -> Result<f64> {
    if k < 1 || k > network_size {
        return Err(Error::Domain(format!("degree {k} outside 1..={network_size}")));
    }
    Ok(ClosedFormPmf::trichotomy(params, gamma, network_size)?.prob(k))
}

/// Heuristic `γ = L + min(1, U/N)`.
pub fn default_gamma(params: &ModelParams, network_size: u64) -> GammaExponent {
    let l = params.lower_bound() as f64;
    let frac = match params.upper_bound() {
        Bound::Infinite => 1.0,
        Bound::Finite(u) => (u as f64 / network_size.max(1) as f64).min(1.0),
    };
    GammaExponent::new(l + frac, params).expect("L + min(1, U/N) lies in [L, L + 1]")
}
