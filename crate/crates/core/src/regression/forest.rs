use alloc::vec::Vec;
use core::fmt;

use super::tree::{FeatureSampler, RegressionTree, TreeParams};
use crate::rng::SeededRng;
use crate::{math, Error, Result};

/// Features tried at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureSubset {
    /// floor(√p)
    Sqrt,
    /// floor(p / 3)
    Third,
    All,
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(self, arity: usize) -> usize {
        let m = match self {
            FeatureSubset::Sqrt => math::floor(math::sqrt(arity as f64)) as usize,
            FeatureSubset::Third => arity / 3,
            FeatureSubset::All => arity,
            FeatureSubset::Count(m) => m.min(arity),
        };
        m.max(1)
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSubset::Sqrt => f.write_str("sqrt"),
            FeatureSubset::Third => f.write_str("third"),
            FeatureSubset::All => f.write_str("all"),
            FeatureSubset::Count(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub m_try: FeatureSubset,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
}

impl RandomForest {
    /// Tree `t` draws its bootstrap and feature subsets from stream `t` of
    /// the seed, so each tree can be rebuilt on its own.
    pub fn fit(x: &[&[f64]], y: &[f64], params: ForestParams) -> Result<Self> {
        if params.n_trees == 0 {
            return Err(Error::InvalidArgument("forest needs at least one tree".into()));
        }
        let n = x.len();
        let arity = x.first().map_or(0, |r| r.len());
        let m_try = params.m_try.resolve(arity);
        let tree_params = TreeParams { max_depth: params.max_depth, min_leaf: params.min_leaf };
        let trees = (0..params.n_trees)
            .map(|t| {
                let mut rng = SeededRng::with_stream(params.seed, t as u64);
                let rows: Vec<usize> = (0..n).map(|_| rng.below(n)).collect();
                let sampler = FeatureSampler { rng: &mut rng, m_try };
                RegressionTree::fit_rows(x, y, rows, tree_params, Some(sampler))
            })
            .collect();
        Ok(Self { trees })
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
    }
}
