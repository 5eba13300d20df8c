//! Model parameters and the modified-degree clamp.
//!
//! A node's attachment weight is its *modified degree*: the degree clamped to
//! the lower bound `L` while the degree is at most the lower threshold, and to
//! the upper bound `U` once it exceeds the upper threshold.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const PROB_SUM_TOL: f64 = 1e-12;

/// An upper bound or threshold that may be absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    /// `min(self, cap)` as a plain integer.
    pub fn clamp_to(self, cap: u64) -> u64 {
        match self {
            Bound::Finite(v) => v.min(cap),
            Bound::Infinite => cap,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Bound::Finite(v) => v as f64,
            Bound::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Infinite) => Ordering::Less,
            (Bound::Infinite, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
        }
    }
}

impl From<u64> for Bound {
    fn from(v: u64) -> Self {
        Bound::Finite(v)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(Bound::Infinite),
            other => other
                .parse::<u64>()
                .map(Bound::Finite)
                .map_err(|e| format!("expected a positive integer or 'inf', got {other:?}: {e}")),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => serializer.serialize_u64(*v),
            Bound::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(Bound::Finite(v)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The five-parameter model plus big-bang connection probabilities.
///
/// `init_conn_probs[i - 1]` is the probability that an arriving node makes
/// `i` initial connections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams", into = "RawModelParams")]
pub struct ModelParams {
    lower_bound: u64,
    lower_threshold: u64,
    upper_threshold: Bound,
    upper_bound: Bound,
    arrival_rate: f64,
    init_conn_probs: Vec<f64>,
    starting_degree: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawModelParams {
    lower_bound: u64,
    lower_threshold: u64,
    upper_threshold: Bound,
    upper_bound: Bound,
    #[serde(default = "default_rate")]
    arrival_rate: f64,
    #[serde(default = "default_init")]
    init_conn_probs: Vec<f64>,
    #[serde(default = "default_start")]
    starting_degree: u64,
}

fn default_rate() -> f64 {
    1.0
}
fn default_init() -> Vec<f64> {
    vec![1.0]
}
fn default_start() -> u64 {
    1
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawModelParams) -> Result<Self> {
        let p = ModelParams {
            lower_bound: raw.lower_bound,
            lower_threshold: raw.lower_threshold,
            upper_threshold: raw.upper_threshold,
            upper_bound: raw.upper_bound,
            arrival_rate: raw.arrival_rate,
            init_conn_probs: raw.init_conn_probs,
            starting_degree: raw.starting_degree,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<ModelParams> for RawModelParams {
    fn from(p: ModelParams) -> Self {
        RawModelParams {
            lower_bound: p.lower_bound,
            lower_threshold: p.lower_threshold,
            upper_threshold: p.upper_threshold,
            upper_bound: p.upper_bound,
            arrival_rate: p.arrival_rate,
            init_conn_probs: p.init_conn_probs,
            starting_degree: p.starting_degree,
        }
    }
}

impl ModelParams {
    /// Builds `(L, ℒ, 𝒰, U)` with unit arrival rate, single initial
    /// connections and starting degree 1.
    pub fn new(
        lower_bound: u64,
        lower_threshold: u64,
        upper_threshold: impl Into<Bound>,
        upper_bound: impl Into<Bound>,
    ) -> Result<Self> {
        let p = ModelParams {
            lower_bound,
            lower_threshold,
            upper_threshold: upper_threshold.into(),
            upper_bound: upper_bound.into(),
            arrival_rate: 1.0,
            init_conn_probs: vec![1.0],
            starting_degree: 1,
        };
        p.validate()?;
        Ok(p)
    }

    /// `L = ℒ` and `U = 𝒰`, the setting used throughout the simulations.
    pub fn symmetric(lower: u64, upper: impl Into<Bound>) -> Result<Self> {
        let upper = upper.into();
        Self::new(lower, lower, upper, upper)
    }

    pub fn with_arrival_rate(mut self, rate: f64) -> Result<Self> {
        self.arrival_rate = rate;
        self.validate()?;
        Ok(self)
    }

    pub fn with_init_conn_probs(mut self, probs: Vec<f64>) -> Result<Self> {
        self.init_conn_probs = probs;
        self.validate()?;
        Ok(self)
    }

    pub fn with_starting_degree(mut self, k0: u64) -> Result<Self> {
        self.starting_degree = k0;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.lower_bound == 0 || self.lower_threshold == 0 {
            return bad("L and ℒ must be positive integers".into());
        }
        if self.lower_bound > self.lower_threshold {
            return bad(format!(
                "L ≤ ℒ violated (L = {}, ℒ = {})",
                self.lower_bound, self.lower_threshold
            ));
        }
        if Bound::Finite(self.lower_threshold) > self.upper_threshold {
            return bad(format!(
                "ℒ ≤ 𝒰 violated (ℒ = {}, 𝒰 = {})",
                self.lower_threshold, self.upper_threshold
            ));
        }
        if self.upper_threshold > self.upper_bound {
            return bad(format!(
                "𝒰 ≤ U violated (𝒰 = {}, U = {})",
                self.upper_threshold, self.upper_bound
            ));
        }
        if self.upper_bound == Bound::Infinite && self.upper_threshold.is_finite() {
            return bad("U = ∞ requires 𝒰 = ∞".into());
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return bad(format!("arrival rate must be positive, got {}", self.arrival_rate));
        }
        if self.starting_degree > 1 {
            return bad(format!("starting degree must be 0 or 1, got {}", self.starting_degree));
        }
        validate_probability_vector(&self.init_conn_probs).map_err(Error::InvalidParams)?;
        let max_len = self.lower_threshold.saturating_add(1);
        if self.init_conn_probs.len() as u64 > max_len {
            return bad(format!(
                "at most ℒ + 1 = {max_len} initial-connection probabilities allowed, got {}",
                self.init_conn_probs.len()
            ));
        }
        Ok(())
    }

    pub fn lower_bound(&self) -> u64 {
        self.lower_bound
    }
    pub fn lower_threshold(&self) -> u64 {
        self.lower_threshold
    }
    pub fn upper_threshold(&self) -> Bound {
        self.upper_threshold
    }
    pub fn upper_bound(&self) -> Bound {
        self.upper_bound
    }
    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }
    pub fn init_conn_probs(&self) -> &[f64] {
        &self.init_conn_probs
    }
    pub fn starting_degree(&self) -> u64 {
        self.starting_degree
    }

    /// The attachment weight of a node of degree `k`.
    pub fn modified_degree(&self, k: u64) -> u64 {
        if k <= self.lower_threshold {
            self.lower_bound
        } else {
            match self.upper_threshold {
                Bound::Finite(uu) if k > uu => {
                    // 𝒰 finite implies U finite
                    self.upper_bound.finite().unwrap_or(k)
                }
                _ => k,
            }
        }
    }

    /// Largest attachment weight reachable by degrees `≤ k_max`.
    pub fn max_modified_degree(&self, k_max: u64) -> u64 {
        let upper = match self.upper_bound {
            Bound::Finite(u) => u.min(k_max.max(self.lower_bound)),
            Bound::Infinite => k_max,
        };
        upper.max(self.lower_bound)
    }

    /// Initial degree distribution of a freshly arrived node, indexed by
    /// degree from 0: `p_i⁰` on `1..` for `k⁰ = 1`, a point mass at 0 otherwise.
    pub fn big_bang_init(&self) -> Vec<f64> {
        if self.starting_degree == 0 {
            vec![1.0]
        } else {
            let mut v = Vec::with_capacity(self.init_conn_probs.len() + 1);
            v.push(0.0);
            v.extend_from_slice(&self.init_conn_probs);
            v
        }
    }
}

pub(crate) fn validate_probability_vector(probs: &[f64]) -> std::result::Result<(), String> {
    if probs.is_empty() {
        return Err("probability vector is empty".into());
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(format!("probabilities must be finite and non-negative, got {p}"));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(format!("probabilities must sum to 1 (got {sum})"));
    }
    Ok(())
}

/// Residential-time exponent γ, bracketed by `L ≤ γ ≤ L + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaExponent(f64);

impl GammaExponent {
    pub fn new(gamma: f64, params: &ModelParams) -> Result<Self> {
        let l = params.lower_bound as f64;
        if !(gamma.is_finite() && gamma >= l && gamma <= l + 1.0) {
            return Err(Error::Parameter(format!(
                "γ = {gamma} outside [L, L + 1] = [{l}, {}]",
                l + 1.0
            )));
        }
        Ok(GammaExponent(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
