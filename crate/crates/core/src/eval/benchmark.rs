use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::metrics::{metrics, Metrics};
use super::split::{check_disjoint, content_split};
use crate::features::FeatureSet;
use crate::regression::{default_grid, fit, grid_search, Dataset, ModelKind, ModelSpec};
use crate::{math, Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Protocol {
    pub base_seed: u64,
    pub n_trials: usize,
    pub test_fraction: f64,
    pub folds: usize,
}

impl Default for Protocol {
    fn default() -> Self {
        Self { base_seed: 0, n_trials: 100, test_fraction: 0.2, folds: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchmarkConfig {
    pub protocol: Protocol,
    /// Per-kind grid overrides; missing kinds use [`default_grid`].
    /// Forest seeds are replaced by the trial seed.
    pub grids: BTreeMap<ModelKind, Vec<ModelSpec>>,
}

impl BenchmarkConfig {
    pub fn grid(&self, kind: ModelKind, trial_seed: u64) -> Vec<ModelSpec> {
        match self.grids.get(&kind) {
            Some(g) => g
                .iter()
                .cloned()
                .map(|mut s| {
                    if let ModelSpec::Rf(p) = &mut s {
                        p.seed = trial_seed;
                    }
                    s
                })
                .collect(),
            None => default_grid(kind, trial_seed),
        }
    }
}

/// One dataset per feature set, all over the same videos in the same order.
#[derive(Debug, Clone)]
pub struct BenchmarkInput {
    sets: Vec<(FeatureSet, Dataset)>,
}

impl BenchmarkInput {
    pub fn new(sets: Vec<(FeatureSet, Dataset)>) -> Result<Self> {
        let Some((_, first)) = sets.first() else {
            return Err(Error::Empty("feature sets"));
        };
        for (set, d) in &sets[1..] {
            let same = d.len() == first.len()
                && d.rows().iter().zip(first.rows()).all(|(a, b)| {
                    a.video_id == b.video_id && a.source_id == b.source_id && a.mos == b.mos
                });
            if !same {
                return Err(Error::Validation(format!("feature set {set} does not cover the same videos")));
            }
        }
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[(FeatureSet, Dataset)] {
        &self.sets
    }

    fn reference(&self) -> &Dataset {
        &self.sets[0].1
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub chosen: Option<ModelSpec>,
    pub cv_rmse: Option<f64>,
    pub metrics: Option<Metrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellReport {
    pub feature_set: FeatureSet,
    pub model: ModelKind,
    pub successes: usize,
    pub failures: usize,
    /// Per-metric medians over the successful trials.
    pub median: Option<Metrics>,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub protocol: Protocol,
    pub cells: Vec<CellReport>,
}

impl EvalReport {
    pub fn cell(&self, set: FeatureSet, kind: ModelKind) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.feature_set == set && c.model == kind)
    }
}

/// Cells in report order: feature sets outer, model kinds inner.
pub fn cells(input: &BenchmarkInput, kinds: &[ModelKind]) -> Vec<(FeatureSet, ModelKind)> {
    input.sets.iter().flat_map(|(s, _)| kinds.iter().map(move |k| (*s, *k))).collect()
}

fn validate(input: &BenchmarkInput, kinds: &[ModelKind], cfg: &BenchmarkConfig) -> Result<()> {
    if kinds.is_empty() {
        return Err(Error::Empty("model kinds"));
    }
    if cfg.protocol.n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
    }
    // surfaces bad fractions and single-source datasets before any work
    content_split(input.reference(), cfg.protocol.test_fraction, cfg.protocol.base_seed)?;
    Ok(())
}

/// Every cell for trial `t`, in [`cells`] order. Independent of other trials.
pub fn run_trial(input: &BenchmarkInput, kinds: &[ModelKind], cfg: &BenchmarkConfig, t: usize) -> Result<Vec<TrialRecord>> {
    let seed = cfg.protocol.base_seed.wrapping_add(t as u64);
    let split = content_split(input.reference(), cfg.protocol.test_fraction, seed)?;
    let mut out = Vec::new();
    for (_, data) in &input.sets {
        check_disjoint(data, &split)?;
        let train = data.subset(&split.train);
        let test = data.subset(&split.test);
        for &kind in kinds {
            let mut rec = TrialRecord {
                trial: t,
                seed,
                n_train: train.len(),
                n_test: test.len(),
                chosen: None,
                cv_rmse: None,
                metrics: None,
                error: None,
            };
            let grid = cfg.grid(kind, seed);
            let outcome = grid_search(&grid, &train, cfg.protocol.folds, seed).and_then(|g| {
                rec.chosen = Some(g.best.clone());
                rec.cv_rmse = Some(g.cv_rmse);
                let model = fit(&g.best, &train)?;
                let pred = crate::regression::predict(&model, &test.features())?;
                metrics(&pred, &test.targets())
            });
            match outcome {
                Ok(m) => rec.metrics = Some(m),
                Err(e) => rec.error = Some(format!("{e}")),
            }
            out.push(rec);
        }
    }
    Ok(out)
}

/// Merge per-trial results (indexed by trial) into the report.
pub fn assemble(
    input: &BenchmarkInput,
    kinds: &[ModelKind],
    cfg: &BenchmarkConfig,
    trials: Vec<Vec<TrialRecord>>,
) -> EvalReport {
    let layout = cells(input, kinds);
    let mut per_cell: Vec<Vec<TrialRecord>> = layout.iter().map(|_| Vec::with_capacity(trials.len())).collect();
    for trial in trials {
        for (c, rec) in trial.into_iter().enumerate() {
            per_cell[c].push(rec);
        }
    }
    let cells = layout
        .into_iter()
        .zip(per_cell)
        .map(|((feature_set, model), mut trials)| {
            trials.sort_by_key(|r| r.trial);
            let ok: Vec<Metrics> = trials.iter().filter_map(|r| r.metrics).collect();
            let med = |f: fn(&Metrics) -> f64| math::median(&ok.iter().map(f).collect::<Vec<_>>());
            let median = match (med(|m| m.srocc), med(|m| m.plcc), med(|m| m.rmse)) {
                (Some(srocc), Some(plcc), Some(rmse)) => Some(Metrics { srocc, plcc, rmse }),
                _ => None,
            };
            CellReport { feature_set, model, successes: ok.len(), failures: trials.len() - ok.len(), median, trials }
        })
        .collect();
    EvalReport { protocol: cfg.protocol.clone(), cells }
}

pub fn run_benchmark(input: &BenchmarkInput, kinds: &[ModelKind], cfg: &BenchmarkConfig) -> Result<EvalReport> {
    validate(input, kinds, cfg)?;
    let trials = (0..cfg.protocol.n_trials)
        .map(|t| run_trial(input, kinds, cfg, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(input, kinds, cfg, trials))
}

/// Checks shared by serial and parallel drivers.
pub fn validate_benchmark(input: &BenchmarkInput, kinds: &[ModelKind], cfg: &BenchmarkConfig) -> Result<()> {
    validate(input, kinds, cfg)
}
