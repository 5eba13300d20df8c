//! Degree histograms, empirical or pooled from simulation runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl DegreeHistogram {
    /// Sums counts of repeated degrees; zero counts are dropped.
    pub fn from_counts(iter: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = DegreeHistogram::default();
        for (k, c) in iter {
            h.add(k, c);
        }
        h
    }

    pub fn from_degrees(degrees: impl IntoIterator<Item = u64>) -> Self {
        Self::from_counts(degrees.into_iter().map(|d| (d, 1)))
    }

    pub fn add(&mut self, degree: u64, count: u64) {
        if count > 0 {
            *self.counts.entry(degree).or_insert(0) += count;
            self.total += count;
        }
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Number of occupied degree bins.
    pub fn occupied_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn k_min(&self) -> Option<u64> {
        self.counts.keys().next().copied()
    }

    pub fn k_max(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub fn prob(&self, k: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(k) as f64 / self.total as f64
    }

    /// `(degree, probability)` over occupied bins, ascending.
    pub fn occupied(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let t = self.total as f64;
        self.counts.iter().map(move |(k, c)| (*k, *c as f64 / t))
    }

    /// Dense pmf over `k_min..=k_max`, zeros included.
    pub fn pmf(&self) -> Vec<f64> {
        match (self.k_min(), self.k_max()) {
            (Some(lo), Some(hi)) => (lo..=hi).map(|k| self.prob(k)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Self::from_counts(self.counts.iter().map(|(k, c)| (*k, c * factor)))
    }
}
