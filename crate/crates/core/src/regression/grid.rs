use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{fit, FeatureSubset, ForestParams, Gamma, MlrParams, ModelKind, ModelSpec, SvrParams, TreeParams, Dataset};
use crate::rng::SeededRng;
use crate::{math, Error, Result};

/// Row indices per fold. Sources are shuffled by `seed` and dealt
/// round-robin, so every source lands in exactly one fold.
pub fn content_folds(data: &Dataset, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    let mut by_source: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in data.rows().iter().enumerate() {
        by_source.entry(r.source_id.as_str()).or_default().push(i);
    }
    let mut sources: Vec<&str> = by_source.keys().copied().collect();
    SeededRng::new(seed).shuffle(&mut sources);
    let mut out = alloc::vec![Vec::new(); folds];
    for (k, s) in sources.iter().enumerate() {
        out[k % folds].extend_from_slice(&by_source[s]);
    }
    if let Some(k) = out.iter().position(Vec::is_empty) {
        return Err(Error::Validation(format!(
            "fold {k} of {folds} is empty: only {} distinct sources in the training split",
            sources.len()
        )));
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

/// Mean held-out RMSE of `spec` over the given folds.
pub fn cross_validate(spec: &ModelSpec, data: &Dataset, folds: &[Vec<usize>]) -> Result<f64> {
    let mut total = 0.0;
    for (k, held) in folds.iter().enumerate() {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        let model = fit(spec, &data.subset(&train))?;
        let mut sse = 0.0;
        for &i in held {
            let r = &data.rows()[i];
            let e = model.predict_one(&r.features)? - r.mos;
            sse += e * e;
        }
        total += math::sqrt(sse / held.len() as f64);
    }
    Ok(total / folds.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub best: ModelSpec,
    pub cv_rmse: f64,
    /// Every grid point in evaluation order with its CV RMSE (or failure).
    pub scores: Vec<(ModelSpec, core::result::Result<f64, String>)>,
}

/// Exhaustive search; the earliest grid point wins ties.
pub fn grid_search(grid: &[ModelSpec], train: &Dataset, folds: usize, seed: u64) -> Result<GridResult> {
    let first = grid.first().ok_or(Error::Empty("hyperparameter grid"))?;
    if let Some(other) = grid.iter().find(|s| s.kind() != first.kind()) {
        return Err(Error::InvalidArgument(format!(
            "grid mixes {} and {}",
            first.kind(),
            other.kind()
        )));
    }
    let folds = content_folds(train, folds, seed)?;
    let mut best: Option<(usize, f64)> = None;
    let mut scores = Vec::with_capacity(grid.len());
    let mut first_error = None;
    for (k, spec) in grid.iter().enumerate() {
        match cross_validate(spec, train, &folds) {
            Ok(rmse) => {
                if best.map_or(true, |(_, b)| rmse < b) {
                    best = Some((k, rmse));
                }
                scores.push((spec.clone(), Ok(rmse)));
            }
            Err(e) => {
                scores.push((spec.clone(), Err(format!("{e}"))));
                first_error.get_or_insert(e);
            }
        }
    }
    match best {
        Some((k, cv_rmse)) => Ok(GridResult { best: grid[k].clone(), cv_rmse, scores }),
        None => Err(first_error.unwrap_or(Error::Empty("hyperparameter grid"))),
    }
}

/// The default search grids, in iteration order.
pub fn default_grid(kind: ModelKind, seed: u64) -> Vec<ModelSpec> {
    const DEPTHS: [Option<usize>; 4] = [Some(3), Some(5), Some(8), None];
    const LEAVES: [usize; 3] = [1, 3, 5];
    let mut out = Vec::new();
    match kind {
        ModelKind::Mlr => {
            for lambda in [0.0, 0.1, 1.0] {
                out.push(ModelSpec::Mlr(MlrParams { lambda }));
            }
        }
        ModelKind::Dt => {
            for max_depth in DEPTHS {
                for min_leaf in LEAVES {
                    out.push(ModelSpec::Dt(TreeParams { max_depth, min_leaf }));
                }
            }
        }
        ModelKind::Rf => {
            for max_depth in DEPTHS {
                for min_leaf in LEAVES {
                    for m_try in [FeatureSubset::Sqrt, FeatureSubset::Third] {
                        out.push(ModelSpec::Rf(ForestParams { n_trees: 100, max_depth, min_leaf, m_try, seed }));
                    }
                }
            }
        }
        ModelKind::Svr => {
            for c in [1.0, 10.0, 100.0] {
                for epsilon in [0.1, 1.0, 5.0] {
                    for gamma in [Gamma::InverseFeatures, Gamma::Value(0.1), Gamma::Value(0.01)] {
                        out.push(ModelSpec::Svr(SvrParams { c, epsilon, gamma }));
                    }
                }
            }
        }
    }
    out
}
