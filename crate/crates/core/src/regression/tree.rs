use alloc::vec::Vec;

use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeParams {
    /// Number of split levels allowed; `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_leaf: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Node {
    Leaf { value: f64 },
    /// Rows with `x[feature] < threshold` go to `left`.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// CART regression tree stored as a flat node table, root at index 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

/// Per-split feature subsampling used by the forest.
pub(crate) struct FeatureSampler<'a> {
    pub rng: &'a mut SeededRng,
    pub m_try: usize,
}

struct Builder<'x, 'r> {
    x: &'x [&'x [f64]],
    y: &'x [f64],
    params: TreeParams,
    sampler: Option<FeatureSampler<'r>>,
    nodes: Vec<Node>,
    arity: usize,
}

struct Best {
    feature: usize,
    threshold: f64,
    gain: f64,
    split_at: usize,
}

impl RegressionTree {
    pub fn fit(x: &[&[f64]], y: &[f64], params: TreeParams) -> Self {
        let rows: Vec<usize> = (0..x.len()).collect();
        Self::fit_rows(x, y, rows, params, None)
    }

    /// Grow on the given row multiset (bootstrap samples may repeat rows).
    pub(crate) fn fit_rows(
        x: &[&[f64]],
        y: &[f64],
        mut rows: Vec<usize>,
        params: TreeParams,
        sampler: Option<FeatureSampler<'_>>,
    ) -> Self {
        let arity = x.first().map_or(0, |r| r.len());
        let mut b = Builder { x, y, params, sampler, nodes: Vec::new(), arity };
        b.grow(&mut rows, 0);
        RegressionTree { nodes: b.nodes }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[feature] < threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

impl Builder<'_, '_> {
    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let n = rows.len() as f64;
        let sum: f64 = rows.iter().map(|&i| self.y[i]).sum();
        let mean = sum / n;
        self.nodes.push(Node::Leaf { value: mean });

        let sse: f64 = rows.iter().map(|&i| (self.y[i] - mean) * (self.y[i] - mean)).sum();
        let min_leaf = self.params.min_leaf.max(1);
        if self.params.max_depth.is_some_and(|d| depth >= d) || rows.len() < 2 * min_leaf || !(sse > 0.0) {
            return id;
        }
        let Some(best) = self.best_split(rows, sse, min_leaf) else {
            return id;
        };

        // stable order keeps ties between equal feature values deterministic
        let f = best.feature;
        rows.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
        let (left_rows, right_rows) = rows.split_at_mut(best.split_at);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id] = Node::Split { feature: f, threshold: best.threshold, left, right };
        id
    }

    fn candidates(&mut self) -> Vec<usize> {
        let mut all: Vec<usize> = (0..self.arity).collect();
        if let Some(s) = self.sampler.as_mut() {
            let m = s.m_try.clamp(1, self.arity.max(1));
            s.rng.partial_shuffle(&mut all, m);
            all.truncate(m);
            all.sort_unstable();
        }
        all
    }

    fn best_split(&mut self, rows: &[usize], parent_sse: f64, min_leaf: usize) -> Option<Best> {
        let n = rows.len();
        let mut order: Vec<usize> = rows.to_vec();
        let mut best: Option<Best> = None;
        let total: f64 = rows.iter().map(|&i| self.y[i]).sum();
        let total_sq: f64 = rows.iter().map(|&i| self.y[i] * self.y[i]).sum();
        let min_gain = 1e-12 * parent_sse;

        for f in self.candidates() {
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let (mut ls, mut lsq) = (0.0, 0.0);
            for k in 1..n {
                let yi = self.y[order[k - 1]];
                ls += yi;
                lsq += yi * yi;
                if k < min_leaf || n - k < min_leaf {
                    continue;
                }
                let (lo, hi) = (self.x[order[k - 1]][f], self.x[order[k]][f]);
                if !(lo < hi) {
                    continue;
                }
                let (nl, nr) = (k as f64, (n - k) as f64);
                let rs = total - ls;
                let rsq = total_sq - lsq;
                let child_sse = (lsq - ls * ls / nl).max(0.0) + (rsq - rs * rs / nr).max(0.0);
                let gain = parent_sse - child_sse;
                if gain > min_gain && best.as_ref().map_or(true, |b| gain > b.gain) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if !(threshold > lo) {
                        threshold = hi;
                    }
                    best = Some(Best { feature: f, threshold, gain, split_at: k });
                }
            }
        }
        best
    }
}
