use satqoe_core::features::{build_feature_vector, column_names, FeatureSet};
use serde_json::json;

use super::{features_file, Summary, TRACES_DIR};
use crate::config::Loaded;
use crate::error::{Error, Result};
use crate::io_util;
use crate::tables::{render_features, FeatureRow, FeatureTable};
use crate::trace_csv::parse_trace_csv;

pub fn cmd_features(cfg: &Loaded, only: Option<FeatureSet>) -> Result<Summary> {
    let dir = cfg.out(TRACES_DIR);
    io_util::require(&dir, "ingest")?;
    let files = io_util::list_files(&dir, "csv")?;
    if files.is_empty() {
        return Err(Error::MissingArtifact { path: dir, producer: "ingest" });
    }
    let traces = files
        .iter()
        .map(|p| parse_trace_csv(&io_util::read_text(p)?, None).map_err(|e| e.at(p)))
        .collect::<Result<Vec<_>>>()?;

    let sets: Vec<FeatureSet> = match only {
        Some(s) => vec![s],
        None => cfg.config.features.sets.clone(),
    };
    let lengths = cfg.config.features.lengths();
    let prov = cfg.provenance();
    let mut outputs = Vec::new();
    for set in sets {
        let rows = traces
            .iter()
            .map(|t| {
                Ok(FeatureRow {
                    video_id: t.video_id().to_string(),
                    source_id: t.source_id().to_string(),
                    values: build_feature_vector(t, set, lengths)?.to_row(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let table = FeatureTable { names: column_names(set, lengths), rows };
        let path = cfg.out(&features_file(set));
        io_util::write_text(&path, &render_features(&table, &prov))?;
        outputs.push(path.display().to_string());
    }
    Ok(json!({ "status": "ok", "command": "features", "videos": traces.len(), "outputs": outputs }))
}
