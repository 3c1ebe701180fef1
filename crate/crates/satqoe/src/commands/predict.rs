use std::path::Path;

use satqoe_core::eval::score_external;
use satqoe_core::regression::predict;
use serde_json::json;

use super::Summary;
use crate::error::{Error, Result};
use crate::io_util;
use crate::model_io::load_model;
use crate::tables::{load_features, parse_id_values, parse_mos, render_id_values};

/// Apply a saved model to a feature CSV. Writes to `out`, or returns the CSV
/// text in the summary when `out` is `None`.
pub fn cmd_predict(model_path: &Path, features_path: &Path, out: Option<&Path>) -> Result<(Summary, String)> {
    let model = load_model(model_path)?;
    let table = load_features(features_path)?;
    if table.names != model.feature_names {
        return Err(Error::Usage(format!(
            "{} has {} feature columns that do not match the model's {} ({} set)",
            features_path.display(),
            table.names.len(),
            model.feature_names.len(),
            model.feature_set
        )));
    }
    let rows: Vec<&[f64]> = table.rows.iter().map(|r| r.values.as_slice()).collect();
    let pred = predict(&model.model, &rows)?;
    let values: Vec<(String, f64)> = table.rows.iter().map(|r| r.video_id.clone()).zip(pred).collect();
    let text = render_id_values("prediction", &values, Some(&model.provenance));
    if let Some(p) = out {
        io_util::write_text(p, &text)?;
    }
    let summary = json!({
        "status": "ok",
        "command": "predict",
        "model": model.model.kind(),
        "videos": values.len(),
        "outputs": out.map(|p| vec![p.display().to_string()]).unwrap_or_default(),
    });
    Ok((summary, text))
}

/// Score externally computed predictions against MOS. The MOS file may be a
/// `satqoe subjective` table (`column` picks mos or continuous_mos) or any
/// two-column `video_id,<value>` CSV.
pub fn cmd_score_external(predictions: &Path, mos_path: &Path, column: &str) -> Result<Summary> {
    let pred = parse_id_values(&io_util::read_text(predictions)?).map_err(|e| e.at(predictions))?;
    let text = io_util::read_text(mos_path)?;
    let mos = match parse_mos(&text) {
        Ok(rows) => rows
            .into_iter()
            .filter_map(|r| {
                let v = match column {
                    "continuous_mos" => r.continuous_mos,
                    _ => r.mos,
                };
                v.map(|v| (r.video_id, v))
            })
            .collect(),
        Err(_) => parse_id_values(&text).map_err(|e| e.at(mos_path))?,
    };
    let m = score_external(&pred, &mos)?;
    Ok(json!({
        "status": "ok",
        "command": "score-external",
        "videos": pred.len(),
        "srocc": m.srocc,
        "plcc": m.plcc,
        "rmse": m.rmse,
    }))
}
