use std::collections::BTreeMap;

use rayon::prelude::*;
use satqoe_core::eval::{assemble, run_trial, validate_benchmark, BenchmarkInput};
use satqoe_core::features::FeatureSet;
use satqoe_core::regression::{fit, grid_search};
use serde_json::json;

use super::{features_file, Summary, MODELS_DIR, MOS_FILE, REPORT_FILE, TRIALS_FILE};
use crate::config::{Loaded, MosTarget};
use crate::error::{Error, Result};
use crate::io_util;
use crate::model_io::ModelFile;
use crate::report::{render_report, render_trials, summary_table};
use crate::tables::{load_features, load_mos};

/// Feature tables joined with the configured MOS column.
pub fn load_benchmark_input(cfg: &Loaded, sets: &[FeatureSet]) -> Result<BenchmarkInput> {
    let mos_path = cfg.out(MOS_FILE);
    io_util::require(&mos_path, "subjective")?;
    let mos: BTreeMap<String, f64> = load_mos(&mos_path)?
        .into_iter()
        .filter_map(|r| {
            let m = match cfg.config.eval.target {
                MosTarget::Endpoint => r.mos,
                MosTarget::Continuous => r.continuous_mos,
            };
            m.map(|m| (r.video_id, m))
        })
        .collect();
    if mos.is_empty() {
        return Err(Error::Usage(format!(
            "{} has no {:?} MOS values",
            mos_path.display(),
            cfg.config.eval.target
        )));
    }
    let mut data = Vec::new();
    for &set in sets {
        let path = cfg.out(&features_file(set));
        io_util::require(&path, "features")?;
        data.push((set, load_features(&path)?.to_dataset(&mos)?));
    }
    Ok(BenchmarkInput::new(data)?)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker threads: {e}")))
}

pub fn cmd_eval(cfg: &Loaded) -> Result<Summary> {
    let sets = cfg.config.features.sets.clone();
    let kinds = cfg.config.eval.models.clone();
    let input = load_benchmark_input(cfg, &sets)?;
    let bench = cfg.benchmark();
    validate_benchmark(&input, &kinds, &bench)?;

    let pool = pool(cfg.config.eval.threads)?;
    let trials = pool.install(|| {
        (0..bench.protocol.n_trials)
            .into_par_iter()
            .map(|t| run_trial(&input, &kinds, &bench, t))
            .collect::<satqoe_core::Result<Vec<_>>>()
    })?;
    let report = assemble(&input, &kinds, &bench, trials);

    let prov = cfg.provenance();
    io_util::write_text(&cfg.out(REPORT_FILE), &render_report(&report, &prov))?;
    io_util::write_text(&cfg.out(TRIALS_FILE), &render_trials(&report, &prov))?;

    // deployable models: grid search and fit on every labeled video
    let seed = bench.protocol.base_seed;
    let cells: Vec<(FeatureSet, satqoe_core::regression::ModelKind)> =
        satqoe_core::eval::cells(&input, &kinds);
    let models = pool.install(|| {
        cells
            .par_iter()
            .map(|&(set, kind)| {
                let data = &input.sets().iter().find(|(s, _)| *s == set).expect("set present").1;
                let best = grid_search(&bench.grid(kind, seed), data, bench.protocol.folds, seed)?;
                let model = fit(&best.best, data)?;
                Ok((set, kind, ModelFile::new(prov.clone(), set, data.feature_names().to_vec(), model)))
            })
            .collect::<satqoe_core::Result<Vec<_>>>()
    })?;
    let mut model_paths = Vec::new();
    for (set, kind, file) in models {
        let path = cfg.out(MODELS_DIR).join(format!("{set}_{}.json", kind.as_str().to_lowercase()));
        io_util::write_text(&path, &file.to_json())?;
        model_paths.push(path.display().to_string());
    }

    eprint!("{}", summary_table(&report));
    let cells_json: Vec<_> = report
        .cells
        .iter()
        .map(|c| {
            json!({
                "feature_set": c.feature_set,
                "model": c.model,
                "successes": c.successes,
                "failures": c.failures,
                "median": c.median,
            })
        })
        .collect();
    Ok(json!({
        "status": "ok",
        "command": "eval",
        "trials": bench.protocol.n_trials,
        "videos": input.sets()[0].1.len(),
        "cells": cells_json,
        "outputs": [cfg.out(REPORT_FILE).display().to_string(), cfg.out(TRIALS_FILE).display().to_string()],
        "models": model_paths,
    }))
}
