//! Pipeline configuration (TOML). Relative paths resolve against the
//! directory holding the config file; command-line flags override values.
//!
//! ```toml
//! output_dir = "out"
//! seed = 7
//!
//! [inputs]
//! catalog = "videos.csv"
//! pcap_dir = "pcap"
//! playback_dir = "playback"
//! endpoint_scores = "study/endpoint.csv"
//! waveforms = "study/waveforms.csv"
//!
//! [features]
//! sets = ["baseline", "b1s", "b1s3s"]
//!
//! [eval]
//! trials = 100
//! models = ["MLR", "DT", "RF", "SVR"]
//!
//! [grids]
//! MLR = [{ lambda = 0.0 }, { lambda = 1.0 }]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use satqoe_core::eval::{BenchmarkConfig, Protocol};
use satqoe_core::features::{FeatureSet, TemporalLengths};
use satqoe_core::regression::{ForestParams, MlrParams, ModelKind, ModelSpec, SvrParams, TreeParams};
use satqoe_core::subjective::{ScreeningOptions, DEFAULT_BAND, FRAME_RATE};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io_util;
use crate::provenance::{sha256_hex, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub features: FeaturesConfig,
    #[serde(default)]
    pub subjective: SubjectiveConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub grids: Grids,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// `video_id,source_id,duration_s[,client_ip]`
    pub catalog: Option<PathBuf>,
    /// Classic pcap files named `<video_id>.pcap`.
    pub pcap_dir: Option<PathBuf>,
    /// Trace CSVs, an alternative to captures.
    pub trace_dir: Option<PathBuf>,
    /// Playback logs named `<video_id>.json`.
    pub playback_dir: Option<PathBuf>,
    pub endpoint_scores: Option<PathBuf>,
    pub waveforms: Option<PathBuf>,
    #[serde(default)]
    pub lenient_pcap: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesConfig {
    #[serde(default = "all_sets")]
    pub sets: Vec<FeatureSet>,
    #[serde(default = "default_per_1s")]
    pub per_1s: usize,
    #[serde(default = "default_per_3s")]
    pub per_3s: usize,
}

fn all_sets() -> Vec<FeatureSet> {
    FeatureSet::ALL.to_vec()
}
fn default_per_1s() -> usize {
    TemporalLengths::default().per_1s
}
fn default_per_3s() -> usize {
    TemporalLengths::default().per_3s
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        Self { sets: all_sets(), per_1s: default_per_1s(), per_3s: default_per_3s() }
    }
}

impl FeaturesConfig {
    pub fn lengths(&self) -> TemporalLengths {
        TemporalLengths { per_1s: self.per_1s, per_3s: self.per_3s }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectiveConfig {
    #[serde(default = "default_band")]
    pub band: usize,
    #[serde(default = "default_frame_rate")]
    pub frame_rate: usize,
}

fn default_band() -> usize {
    DEFAULT_BAND
}
fn default_frame_rate() -> usize {
    FRAME_RATE
}

impl Default for SubjectiveConfig {
    fn default() -> Self {
        Self { band: DEFAULT_BAND, frame_rate: FRAME_RATE }
    }
}

impl SubjectiveConfig {
    pub fn screening(&self) -> ScreeningOptions {
        ScreeningOptions { band: self.band, frame_rate: self.frame_rate }
    }
}

/// Which ground truth the regressors learn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MosTarget {
    /// Endpoint MOS recovered from retrospective scores.
    #[default]
    Endpoint,
    /// Time-averaged screened continuous MOS.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "all_models")]
    pub models: Vec<ModelKind>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub target: MosTarget,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: usize,
}

fn default_trials() -> usize {
    100
}
fn all_models() -> Vec<ModelKind> {
    ModelKind::ALL.to_vec()
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_folds() -> usize {
    5
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            models: all_models(),
            test_fraction: default_test_fraction(),
            folds: default_folds(),
            target: MosTarget::Endpoint,
            threads: 0,
        }
    }
}

/// Grid overrides per model kind. Forest seeds are always the trial seed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(rename = "MLR", default, skip_serializing_if = "Option::is_none")]
    pub mlr: Option<Vec<MlrParams>>,
    #[serde(rename = "DT", default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<Vec<TreeParams>>,
    #[serde(rename = "RF", default, skip_serializing_if = "Option::is_none")]
    pub rf: Option<Vec<ForestParams>>,
    #[serde(rename = "SVR", default, skip_serializing_if = "Option::is_none")]
    pub svr: Option<Vec<SvrParams>>,
}

impl Grids {
    pub fn to_map(&self) -> BTreeMap<ModelKind, Vec<ModelSpec>> {
        let mut m = BTreeMap::new();
        if let Some(g) = &self.mlr {
            m.insert(ModelKind::Mlr, g.iter().copied().map(ModelSpec::Mlr).collect());
        }
        if let Some(g) = &self.dt {
            m.insert(ModelKind::Dt, g.iter().copied().map(ModelSpec::Dt).collect());
        }
        if let Some(g) = &self.rf {
            m.insert(ModelKind::Rf, g.iter().copied().map(ModelSpec::Rf).collect());
        }
        if let Some(g) = &self.svr {
            m.insert(ModelKind::Svr, g.iter().copied().map(ModelSpec::Svr).collect());
        }
        m
    }
}

impl Default for Config {
    fn default() -> Self {
        Self {
            output_dir: default_output_dir(),
            seed: 0,
            inputs: Inputs::default(),
            features: FeaturesConfig::default(),
            subjective: SubjectiveConfig::default(),
            eval: EvalConfig::default(),
            grids: Grids::default(),
        }
    }
}

/// A parsed config plus the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Config,
    pub base_dir: PathBuf,
    /// Output directory given on the command line; not part of the digest.
    pub output_override: Option<PathBuf>,
}

impl Loaded {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = io_util::read_text(path)?;
        let config = parse_config(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, base_dir, output_override: None })
    }

    pub fn in_dir(config: Config, base_dir: PathBuf) -> Self {
        Self { config, base_dir, output_override: None }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() { p.to_path_buf() } else { self.base_dir.join(p) }
    }

    pub fn input(&self, p: &Option<PathBuf>) -> Option<PathBuf> {
        p.as_deref().map(|p| self.resolve(p))
    }

    pub fn output_dir(&self) -> PathBuf {
        match &self.output_override {
            Some(p) => p.clone(),
            None => self.resolve(&self.config.output_dir),
        }
    }

    pub fn out(&self, name: &str) -> PathBuf {
        self.output_dir().join(name)
    }

    /// SHA-256 of the effective settings, paths as written, output dir excluded.
    pub fn digest(&self) -> String {
        let mut c = self.config.clone();
        c.output_dir = PathBuf::new();
        sha256_hex(serde_json::to_string(&c).expect("config serializes").as_bytes())
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new(self.digest(), self.config.seed)
    }

    pub fn benchmark(&self) -> BenchmarkConfig {
        let e = &self.config.eval;
        BenchmarkConfig {
            protocol: Protocol {
                base_seed: self.config.seed,
                n_trials: e.trials,
                test_fraction: e.test_fraction,
                folds: e.folds,
            },
            grids: self.config.grids.to_map(),
        }
    }
}

pub fn parse_config(text: &str) -> Result<Config> {
    let c: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    validate(&c)?;
    Ok(c)
}

pub fn validate(c: &Config) -> Result<()> {
    if c.features.sets.is_empty() {
        return Err(Error::Config("features.sets is empty".into()));
    }
    if c.eval.models.is_empty() {
        return Err(Error::Config("eval.models is empty".into()));
    }
    if c.eval.trials == 0 {
        return Err(Error::Config("eval.trials must be at least 1".into()));
    }
    if !(c.eval.test_fraction > 0.0 && c.eval.test_fraction < 1.0) {
        return Err(Error::Config(format!("eval.test_fraction {} is outside (0, 1)", c.eval.test_fraction)));
    }
    if c.eval.folds < 2 {
        return Err(Error::Config("eval.folds must be at least 2".into()));
    }
    if c.subjective.frame_rate == 0 {
        return Err(Error::Config("subjective.frame_rate must be positive".into()));
    }
    for (kind, grid) in c.grids.to_map() {
        if grid.is_empty() {
            return Err(Error::Config(format!("grids.{kind} is empty")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use satqoe_core::regression::{FeatureSubset, Gamma};

    #[test]
    fn defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.eval.trials, 100);
        assert_eq!(c.features.sets.len(), 3);
    }

    #[test]
    fn grids_and_unknown_keys() {
        let c = parse_config(
            r#"
            [grids]
            MLR = [{ lambda = 0.5 }]
            DT = [{ min_leaf = 2 }, { max_depth = 3, min_leaf = 1 }]
            RF = [{ n_trees = 10, min_leaf = 1, m_try = "sqrt" }, { n_trees = 5, min_leaf = 2, m_try = { count = 3 } }]
            SVR = [{ c = 1.0, epsilon = 0.1, gamma = "inverse_features" }, { c = 10.0, epsilon = 1.0, gamma = { value = 0.1 } }]
            "#,
        )
        .unwrap();
        let g = c.grids;
        assert_eq!(g.dt.as_ref().unwrap()[0].max_depth, None);
        assert_eq!(g.rf.as_ref().unwrap()[1].m_try, FeatureSubset::Count(3));
        assert_eq!(g.svr.as_ref().unwrap()[1].gamma, Gamma::Value(0.1));
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("[eval]\ntrials = 0").is_err());
        assert!(parse_config("[grids]\nMLR = []").is_err());
    }

    #[test]
    fn digest_ignores_output_dir() {
        let a = Loaded::in_dir(parse_config("output_dir = \"a\"").unwrap(), PathBuf::from("/x"));
        let b = Loaded::in_dir(parse_config("output_dir = \"b\"").unwrap(), PathBuf::from("/y"));
        assert_eq!(a.digest(), b.digest());
        let c = Loaded::in_dir(parse_config("seed = 3").unwrap(), PathBuf::from("/x"));
        assert_ne!(a.digest(), c.digest());
    }
}
