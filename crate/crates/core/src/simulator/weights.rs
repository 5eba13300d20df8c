//! Fenwick tree over per-node attachment weights.

use rand::Rng;

#[derive(Clone, Debug, Default)]
pub struct WeightIndex {
    tree: Vec<u64>,
    weights: Vec<u64>,
    total: u64,
}

impl WeightIndex {
    pub fn with_capacity(n: usize) -> Self {
        WeightIndex {
            tree: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            total: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights[i]
    }

    /// Appends an element in O(log n): the new tree slot covers the range
    /// `(i − lowbit(i), i]`, assembled from already-built child slots.
    pub fn push(&mut self, w: u64) {
        let i = self.weights.len() + 1;
        let mut node = w;
        let low = i & i.wrapping_neg();
        let mut j = 1;
        while j < low {
            node += self.tree[i - j - 1];
            j <<= 1;
        }
        self.tree.push(node);
        self.weights.push(w);
        self.total += w;
    }

    pub fn set(&mut self, i: usize, w: u64) {
        let old = self.weights[i];
        if old == w {
            return;
        }
        self.weights[i] = w;
        self.total = self.total - old + w;
        let mut j = i + 1;
        while j <= self.tree.len() {
            self.tree[j - 1] = self.tree[j - 1] - old + w;
            j += j & j.wrapping_neg();
        }
    }

    /// Index of the element whose cumulative range contains `target`,
    /// i.e. the smallest `i` with `w_0 + … + w_i > target`.
    pub fn find(&self, mut target: u64) -> usize {
        let n = self.tree.len();
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next - 1] <= target {
                pos = next;
                target -= self.tree[next - 1];
            }
            step >>= 1;
        }
        pos
    }

    /// Draws `i` with probability `w_i / total`. Requires a positive total.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        debug_assert!(self.total > 0);
        self.find(rng.random_range(0..self.total))
    }
}
