//! Trained models as JSON documents.
//!
//! ```json
//! {"format": "satqoe-model/1", "provenance": {..}, "feature_set": "b1s3s",
//!  "feature_names": [..], "model": {"spec": {"kind": "SVR", ..}, "arity": 99,
//!  "learned": {"model": "Svr", "standardizer": {..}, ..}}}
//! ```

use std::path::Path;

use satqoe_core::features::FeatureSet;
use satqoe_core::regression::TrainedModel;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_util;
use crate::provenance::Provenance;

pub const MODEL_FORMAT: &str = "satqoe-model/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub provenance: Provenance,
    pub feature_set: FeatureSet,
    pub feature_names: Vec<String>,
    pub model: TrainedModel,
}

impl ModelFile {
    pub fn new(provenance: Provenance, feature_set: FeatureSet, feature_names: Vec<String>, model: TrainedModel) -> Self {
        Self { format: MODEL_FORMAT.into(), provenance, feature_set, feature_names, model }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = io_util::read_text(path)?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
    if file.format != MODEL_FORMAT {
        return Err(Error::parse(path, format!("unsupported model format {:?}", file.format)));
    }
    if file.feature_names.len() != file.model.arity {
        return Err(Error::parse(path, "feature_names length differs from model arity"));
    }
    Ok(file)
}
