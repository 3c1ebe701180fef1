//! From raw per-subject ratings to per-video ground truth.
//!
//! Endpoint scores go through [`sureal_recover`]; continuous 60 Hz waveforms go
//! through [`zscore_normalize`] and [`screen_subjects`] (1 Hz downsampling,
//! banded [`dtw_align`] against the mean waveform, adjusted-boxplot rejection).

mod dtw;
mod robust;
mod screening;
mod sureal;
mod zscore;

pub use dtw::{downsample, dtw_align, Alignment, DEFAULT_BAND};
pub use robust::{medcouple, quartiles, rejection_fence, Fence, FENCE_SKEW_WEIGHT};
pub use screening::{
    mean_waveform, screen_subjects, ContinuousMos, MeanWaveform, RaterDisparity, RejectionReport,
    Screening, ScreeningOptions, VideoScreening,
};
pub use sureal::{sureal_recover, RecoveredQuality, SurealOptions};
pub use zscore::{zscore_normalize, ExcludedGroup, GroupStats, ZScores};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{math, Error, Result};

/// Ratings are on a 0–100 scale.
pub const SCORE_RANGE: (f64, f64) = (0.0, 100.0);

/// Continuous ratings are captured at this rate.
pub const FRAME_RATE: usize = 60;

/// Identifies one continuous waveform.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveformKey {
    pub subject: String,
    pub session: String,
    pub video: String,
}

impl WaveformKey {
    pub fn new(subject: impl Into<String>, session: impl Into<String>, video: impl Into<String>) -> Self {
        Self { subject: subject.into(), session: session.into(), video: video.into() }
    }
}

/// Endpoint scores keyed by `(subject, video)`.
pub type EndpointScores = BTreeMap<(String, String), f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct RawStudy {
    endpoint: EndpointScores,
    continuous: BTreeMap<WaveformKey, Vec<f64>>,
}

impl RawStudy {
    /// Validates score ranges and waveform lengths.
    ///
    /// All waveforms of one video must have the same length; when
    /// `frame_counts` is supplied that length must equal the video's frame
    /// count.
    pub fn new(
        endpoint: EndpointScores,
        continuous: BTreeMap<WaveformKey, Vec<f64>>,
        frame_counts: Option<&BTreeMap<String, usize>>,
    ) -> Result<Self> {
        let (lo, hi) = SCORE_RANGE;
        let in_range = |v: f64| v.is_finite() && (lo..=hi).contains(&v);
        if let Some(((s, v), score)) = endpoint.iter().find(|(_, &x)| !in_range(x)) {
            return Err(Error::Validation(format!(
                "endpoint score {score} of subject {s} for video {v} is outside [0, 100]"
            )));
        }
        let mut lengths: BTreeMap<&str, (usize, &WaveformKey)> = BTreeMap::new();
        for (key, wave) in &continuous {
            if wave.is_empty() {
                return Err(Error::Validation(format!("empty waveform for {key:?}")));
            }
            if let Some(x) = wave.iter().find(|&&x| !in_range(x)) {
                return Err(Error::Validation(format!("sample {x} of {key:?} is outside [0, 100]")));
            }
            match lengths.get(key.video.as_str()) {
                Some(&(len, first)) if len != wave.len() => {
                    return Err(Error::Validation(format!(
                        "video {}: waveform of {first:?} has {len} frames but {key:?} has {}",
                        key.video,
                        wave.len()
                    )));
                }
                Some(_) => {}
                None => {
                    lengths.insert(&key.video, (wave.len(), key));
                }
            }
            if let Some(expected) = frame_counts.and_then(|m| m.get(&key.video)) {
                if *expected != wave.len() {
                    return Err(Error::Validation(format!(
                        "video {} has {expected} frames but waveform {key:?} has {}",
                        key.video,
                        wave.len()
                    )));
                }
            }
        }
        Ok(Self { endpoint, continuous })
    }

    pub fn endpoint(&self) -> &EndpointScores {
        &self.endpoint
    }

    pub fn continuous(&self) -> &BTreeMap<WaveformKey, Vec<f64>> {
        &self.continuous
    }

    /// Pooled mean and sample std of every raw continuous sample. This fixes
    /// the affine map taking Z-scores back onto the rating scale.
    pub fn continuous_scale(&self) -> (f64, f64) {
        let (mut n, mut sum) = (0usize, 0.0);
        for w in self.continuous.values() {
            n += w.len();
            sum += w.iter().sum::<f64>();
        }
        if n == 0 {
            return (0.0, 1.0);
        }
        let mean = sum / n as f64;
        let ss: f64 = self.continuous.values().flatten().map(|x| (x - mean) * (x - mean)).sum();
        let std = if n > 1 { math::sqrt(ss / (n - 1) as f64) } else { 0.0 };
        (mean, if std > 0.0 { std } else { 1.0 })
    }
}
