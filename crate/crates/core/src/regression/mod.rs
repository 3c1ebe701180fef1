//! The four MOS regressors and their content-disjoint grid search.
//!
//! Linear regression and SVR see features standardized with training-set
//! statistics; trees and forests see raw features.

mod forest;
mod grid;
mod linalg;
mod linear;
mod standardize;
pub mod svr;
mod tree;

pub use forest::{FeatureSubset, ForestParams, RandomForest};
pub use grid::{content_folds, cross_validate, default_grid, grid_search, GridResult};
pub use linear::{LinearModel, MlrParams};
pub use standardize::Standardizer;
pub use svr::{Gamma, SvrModel, SvrParams};
pub use tree::{Node, RegressionTree, TreeParams};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// One labeled video.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub video_id: String,
    pub source_id: String,
    pub features: Vec<f64>,
    pub mos: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    rows: Vec<Sample>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Sample>) -> Result<Self> {
        let arity = feature_names.len();
        for r in &rows {
            if r.features.len() != arity {
                return Err(Error::Arity { expected: arity, got: r.features.len() });
            }
            if !r.mos.is_finite() {
                return Err(Error::Validation(format!("video {} has non-finite mos", r.video_id)));
            }
            if r.features.iter().any(|x| !x.is_finite()) {
                return Err(Error::Validation(format!("video {} has a non-finite feature", r.video_id)));
            }
        }
        Ok(Self { feature_names, rows })
    }

    /// Unnamed features `x0, x1, ..`, handy for synthetic data.
    pub fn from_xy(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        let arity = x.first().map_or(0, Vec::len);
        let names = (0..arity).map(|k| format!("x{k}")).collect();
        let rows = x
            .into_iter()
            .zip(y)
            .enumerate()
            .map(|(i, (features, mos))| Sample {
                video_id: format!("row{i}"),
                source_id: format!("src{i}"),
                features,
                mos,
            })
            .collect();
        Self::new(names, rows)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn arity(&self) -> usize {
        self.feature_names.len()
    }

    pub fn rows(&self) -> &[Sample] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn features(&self) -> Vec<&[f64]> {
        self.rows.iter().map(|r| r.features.as_slice()).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mos).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    #[cfg_attr(feature = "serde", serde(rename = "MLR"))]
    Mlr,
    #[cfg_attr(feature = "serde", serde(rename = "DT"))]
    Dt,
    #[cfg_attr(feature = "serde", serde(rename = "RF"))]
    Rf,
    #[cfg_attr(feature = "serde", serde(rename = "SVR"))]
    Svr,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Mlr, ModelKind::Dt, ModelKind::Rf, ModelKind::Svr];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Mlr => "MLR",
            ModelKind::Dt => "DT",
            ModelKind::Rf => "RF",
            ModelKind::Svr => "SVR",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model kind {s:?} (MLR, DT, RF, SVR)")))
    }
}

/// A model kind with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind"))]
pub enum ModelSpec {
    #[cfg_attr(feature = "serde", serde(rename = "MLR"))]
    Mlr(MlrParams),
    #[cfg_attr(feature = "serde", serde(rename = "DT"))]
    Dt(TreeParams),
    #[cfg_attr(feature = "serde", serde(rename = "RF"))]
    Rf(ForestParams),
    #[cfg_attr(feature = "serde", serde(rename = "SVR"))]
    Svr(SvrParams),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Mlr(_) => ModelKind::Mlr,
            ModelSpec::Dt(_) => ModelKind::Dt,
            ModelSpec::Rf(_) => ModelKind::Rf,
            ModelSpec::Svr(_) => ModelKind::Svr,
        }
    }

    /// Compact `key=value` description, stable across runs.
    pub fn describe(&self) -> String {
        let depth = |d: Option<usize>| d.map_or_else(|| String::from("none"), |d| format!("{d}"));
        match self {
            ModelSpec::Mlr(p) => format!("MLR lambda={}", p.lambda),
            ModelSpec::Dt(p) => format!("DT max_depth={} min_leaf={}", depth(p.max_depth), p.min_leaf),
            ModelSpec::Rf(p) => format!(
                "RF n_trees={} max_depth={} min_leaf={} m_try={} seed={}",
                p.n_trees,
                depth(p.max_depth),
                p.min_leaf,
                p.m_try,
                p.seed
            ),
            ModelSpec::Svr(p) => format!("SVR C={} epsilon={} gamma={}", p.c, p.epsilon, p.gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "model"))]
pub enum Learned {
    Linear(LinearModel),
    Tree(RegressionTree),
    Forest(RandomForest),
    Svr(SvrModel),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub arity: usize,
    pub learned: Learned,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.spec.kind()
    }

    pub fn predict_one(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: row.len() });
        }
        Ok(match &self.learned {
            Learned::Linear(m) => m.predict(row),
            Learned::Tree(m) => m.predict(row),
            Learned::Forest(m) => m.predict(row),
            Learned::Svr(m) => m.predict(row),
        })
    }
}

pub fn fit(spec: &ModelSpec, train: &Dataset) -> Result<TrainedModel> {
    if train.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 training rows, got {}",
            train.len()
        )));
    }
    let x = train.features();
    let y = train.targets();
    let learned = match spec {
        ModelSpec::Mlr(p) => Learned::Linear(LinearModel::fit(&x, &y, *p)),
        ModelSpec::Dt(p) => Learned::Tree(RegressionTree::fit(&x, &y, *p)),
        ModelSpec::Rf(p) => Learned::Forest(RandomForest::fit(&x, &y, *p)?),
        ModelSpec::Svr(p) => Learned::Svr(SvrModel::fit(&x, &y, *p)?),
    };
    Ok(TrainedModel { spec: spec.clone(), arity: train.arity(), learned })
}

pub fn predict<R: AsRef<[f64]>>(model: &TrainedModel, rows: &[R]) -> Result<Vec<f64>> {
    rows.iter().map(|r| model.predict_one(r.as_ref())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn arity_checked() {
        let d = Dataset::from_xy(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0]], vec![1.0, 2.0, 3.0])
            .unwrap();
        let m = fit(&ModelSpec::Mlr(MlrParams { lambda: 0.0 }), &d).unwrap();
        assert!(matches!(m.predict_one(&[1.0]), Err(Error::Arity { expected: 2, got: 1 })));
        assert!(Dataset::from_xy(vec![vec![0.0], vec![1.0, 2.0]], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn needs_two_rows() {
        let d = Dataset::from_xy(vec![vec![0.0]], vec![1.0]).unwrap();
        assert!(fit(&ModelSpec::Mlr(MlrParams { lambda: 0.0 }), &d).is_err());
    }

    #[test]
    fn constant_target_predicts_constant() {
        let d = Dataset::from_xy((0..8).map(|i| vec![i as f64, (i * i) as f64]).collect(), vec![4.5; 8])
            .unwrap();
        let specs = [
            ModelSpec::Mlr(MlrParams { lambda: 0.0 }),
            ModelSpec::Dt(TreeParams { max_depth: None, min_leaf: 1 }),
            ModelSpec::Rf(ForestParams {
                n_trees: 5,
                max_depth: None,
                min_leaf: 1,
                m_try: FeatureSubset::All,
                seed: 1,
            }),
            ModelSpec::Svr(SvrParams { c: 10.0, epsilon: 0.1, gamma: Gamma::InverseFeatures }),
        ];
        for spec in specs {
            let m = fit(&spec, &d).unwrap();
            let p = m.predict_one(&[3.5, 1.0]).unwrap();
            assert!((p - 4.5).abs() < 1e-9, "{:?} predicted {p}", spec.kind());
        }
    }

    #[test]
    fn kind_names() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
        assert_eq!("svr".parse::<ModelKind>().unwrap(), ModelKind::Svr);
    }
}
