//! Stochastic growth under bounded preferential attachment.
//!
//! Only the embedded jump chain is simulated: each arrival picks its targets
//! in proportion to their modified degrees, which does not depend on the
//! arrival rate.

mod weights;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

pub use weights::WeightIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SimMode {
    /// Grow from a two-node chain; report every node.
    Standard,
    /// Start from `fixed_count` isolated nodes, grow to the target size, and
    /// report only the initial nodes (degree 0 included).
    PoissonFixedSet { fixed_count: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub target_size: u64,
    pub runs: u64,
    pub mode: SimMode,
    pub rng_seed: u64,
    pub record_tail_variance: bool,
    /// Worker threads for ensembles; `None` uses the global rayon pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn new(params: ModelParams, target_size: u64, runs: u64, rng_seed: u64) -> Self {
        SimConfig {
            params,
            target_size,
            runs,
            mode: SimMode::Standard,
            rng_seed,
            record_tail_variance: false,
            threads: None,
        }
    }

    pub fn with_mode(mut self, mode: SimMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_tail_variance(mut self, on: bool) -> Self {
        self.record_tail_variance = on;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_size < 2 {
            return Err(Error::Config(format!(
                "target size must be at least 2, got {}",
                self.target_size
            )));
        }
        if self.runs < 1 {
            return Err(Error::Config("at least one run is required".into()));
        }
        if let SimMode::PoissonFixedSet { fixed_count } = self.mode {
            if fixed_count == 0 || fixed_count >= self.target_size {
                return Err(Error::Config(format!(
                    "fixed set size must be in 1..{}, got {fixed_count}",
                    self.target_size
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        Ok(())
    }

    /// Smallest degree counted in the empirical pmf.
    pub fn min_reported_degree(&self) -> u64 {
        match self.mode {
            SimMode::Standard => self.params.starting_degree(),
            SimMode::PoissonFixedSet { .. } => 0,
        }
    }
}

/// Per-node degrees plus the weight index over their modified degrees.
#[derive(Clone, Debug)]
pub struct GrowthState {
    params: ModelParams,
    degrees: Vec<u32>,
    weights: WeightIndex,
    edges: u64,
}

impl GrowthState {
    pub fn new(params: &ModelParams, capacity: usize) -> Self {
        GrowthState {
            params: params.clone(),
            degrees: Vec::with_capacity(capacity),
            weights: WeightIndex::with_capacity(capacity),
            edges: 0,
        }
    }

    /// The two-node chain every standard run starts from.
    pub fn chain(params: &ModelParams, capacity: usize) -> Self {
        let mut s = Self::new(params, capacity);
        s.add_node(1);
        s.add_node(1);
        s.edges = 1;
        s
    }

    fn add_node(&mut self, degree: u32) -> usize {
        self.degrees.push(degree);
        self.weights.push(self.params.modified_degree(degree as u64));
        self.degrees.len() - 1
    }

    fn increment(&mut self, i: usize) {
        self.degrees[i] += 1;
        self.weights.set(i, self.params.modified_degree(self.degrees[i] as u64));
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    /// `S_n`, the sum of modified degrees.
    pub fn total_weight(&self) -> u64 {
        self.weights.total()
    }

    /// Adds a node joined to `m` distinct existing nodes (fewer if the
    /// network is smaller than `m`).
    pub fn arrive<R: Rng + ?Sized>(&mut self, m: usize, rng: &mut R, scratch: &mut Vec<usize>) {
        let m = m.min(self.len());
        scratch.clear();
        for _ in 0..m {
            let t = sample_attachment_target(self, rng);
            // excluded from further draws within this arrival
            self.weights.set(t, 0);
            scratch.push(t);
        }
        for &t in scratch.iter() {
            self.increment(t);
        }
        self.add_node(m as u32);
        self.edges += m as u64;
    }
}

/// Draws a node with probability `k̂_i / S_n`.
pub fn sample_attachment_target<R: Rng + ?Sized>(state: &GrowthState, rng: &mut R) -> usize {
    state.weights.sample(rng)
}

fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Cumulative initial-connection distribution; index `i` covers `i + 1` links.
fn connection_cdf(params: &ModelParams) -> Vec<f64> {
    params
        .init_conn_probs()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn draw_connections<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    if cdf.len() == 1 {
        return 1;
    }
    let u: f64 = rng.random();
    cdf.iter().position(|c| u < *c).unwrap_or(cdf.len() - 1) + 1
}

fn grow_state(config: &SimConfig, rng: &mut ChaCha8Rng) -> GrowthState {
    let n = config.target_size as usize;
    let params = &config.params;
    let mut state = match config.mode {
        SimMode::Standard => GrowthState::chain(params, n),
        SimMode::PoissonFixedSet { fixed_count } => {
            let mut s = GrowthState::new(params, n);
            for _ in 0..fixed_count {
                s.add_node(0);
            }
            s
        }
    };
    let cdf = connection_cdf(params);
    let mut scratch = Vec::new();
    while state.len() < n {
        let m = draw_connections(&cdf, rng);
        state.arrive(m, rng, &mut scratch);
    }
    state
}

/// Reported degrees of one run (the fixed set only in Poisson mode).
pub fn grow_network(config: &SimConfig, seed: u64) -> Result<Vec<u64>> {
    config.validate()?;
    Ok(reported_degrees(config, run_rng(seed, 0)))
}

fn reported_degrees(config: &SimConfig, mut rng: ChaCha8Rng) -> Vec<u64> {
    let state = grow_state(config, &mut rng);
    let keep = match config.mode {
        SimMode::Standard => state.len(),
        SimMode::PoissonFixedSet { fixed_count } => fixed_count as usize,
    };
    state.degrees[..keep].iter().map(|d| *d as u64).collect()
}

/// Averaged empirical pmf of an ensemble, indexed from `k_min`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePmf {
    k_min: u64,
    mean_pmf: Vec<f64>,
    per_bin_variance: Vec<f64>,
    runs: u64,
    /// Node counts per degree summed over all runs, indexed from 0.
    pooled_counts: Vec<u64>,
    tail_variance: Option<f64>,
}

impl EnsemblePmf {
    pub fn k_min(&self) -> u64 {
        self.k_min
    }

    pub fn k_max(&self) -> u64 {
        self.k_min + self.mean_pmf.len() as u64 - 1
    }

    pub fn mean_pmf(&self) -> &[f64] {
        &self.mean_pmf
    }

    pub fn per_bin_variance(&self) -> &[f64] {
        &self.per_bin_variance
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    pub fn prob(&self, k: u64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        self.mean_pmf.get((k - self.k_min) as usize).copied().unwrap_or(0.0)
    }

    pub fn variance(&self, k: u64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        self.per_bin_variance.get((k - self.k_min) as usize).copied().unwrap_or(0.0)
    }

    /// Mean pmf as a dense vector indexed by degree from 0.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.k_min as usize];
        v.extend_from_slice(&self.mean_pmf);
        v
    }

    pub fn pooled_counts(&self) -> &[u64] {
        &self.pooled_counts
    }

    /// Node counts pooled over runs, restricted to reported degrees.
    pub fn pooled_histogram(&self) -> crate::histogram::DegreeHistogram {
        crate::histogram::DegreeHistogram::from_counts(
            self.pooled_counts
                .iter()
                .enumerate()
                .skip(self.k_min as usize)
                .filter(|(_, c)| **c > 0)
                .map(|(k, c)| (k as u64, *c)),
        )
    }

    /// Mean per-bin variance over the top decile of occupied degree bins,
    /// when requested in the config.
    pub fn tail_variance(&self) -> Option<f64> {
        self.tail_variance
    }

    /// Mean of `per_bin_variance` over the highest tenth (at least one) of
    /// the degree bins occupied in any run.
    pub fn top_decile_variance(&self) -> f64 {
        let occupied: Vec<usize> = self
            .pooled_counts
            .iter()
            .enumerate()
            .skip(self.k_min as usize)
            .filter(|(_, c)| **c > 0)
            .map(|(k, _)| k - self.k_min as usize)
            .collect();
        if occupied.is_empty() {
            return 0.0;
        }
        let take = occupied.len().div_ceil(10);
        let top = &occupied[occupied.len() - take..];
        top.iter().map(|i| self.per_bin_variance[*i]).sum::<f64>() / take as f64
    }
}

fn run_pmf(degrees: &[u64], k_min: u64) -> Vec<u64> {
    let max = degrees.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; max + 1];
    for d in degrees {
        counts[*d as usize] += 1;
    }
    counts.iter_mut().take(k_min as usize).for_each(|c| *c = 0);
    counts
}

/// Runs `config.runs` independent growths (in parallel) and averages their
/// empirical pmfs. Run `r` draws from substream `r` of the seed, so the result
/// does not depend on scheduling.
pub fn run_ensemble(config: &SimConfig) -> Result<EnsemblePmf> {
    config.validate()?;
    let k_min = config.min_reported_degree();
    let work = || -> Vec<Vec<u64>> {
        (0..config.runs)
            .into_par_iter()
            .map(|r| run_pmf(&reported_degrees(config, run_rng(config.rng_seed, r)), k_min))
            .collect()
    };
    let per_run = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(aggregate(per_run, k_min, config.record_tail_variance))
}

fn aggregate(per_run: Vec<Vec<u64>>, k_min: u64, tail: bool) -> EnsemblePmf {
    let width = per_run.iter().map(Vec::len).max().unwrap_or(0).max(k_min as usize + 1);
    let m = per_run.len();
    let mut pooled = vec![0u64; width];
    let pmfs: Vec<Vec<f64>> = per_run
        .iter()
        .map(|counts| {
            let total: u64 = counts.iter().sum();
            let mut p = vec![0.0; width];
            for (k, c) in counts.iter().enumerate() {
                pooled[k] += c;
                if total > 0 {
                    p[k] = *c as f64 / total as f64;
                }
            }
            p
        })
        .collect();
    let lo = k_min as usize;
    let mean: Vec<f64> = (lo..width)
        .map(|k| pmfs.iter().map(|p| p[k]).sum::<f64>() / m as f64)
        .collect();
    let var: Vec<f64> = (lo..width)
        .map(|k| {
            if m < 2 {
                return 0.0;
            }
            let mu = mean[k - lo];
            pmfs.iter().map(|p| (p[k] - mu).powi(2)).sum::<f64>() / (m - 1) as f64
        })
        .collect();
    let mut out = EnsemblePmf {
        k_min,
        mean_pmf: mean,
        per_bin_variance: var,
        runs: m as u64,
        pooled_counts: pooled,
        tail_variance: None,
    };
    if tail {
        out.tail_variance = Some(out.top_decile_variance());
    }
    out
}
