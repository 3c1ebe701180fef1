//! Per-video subject screening of continuous waveforms.
//!
//! For every video: Z-scored waveforms are averaged to 1 Hz, a mean waveform is
//! built from all raters, each rater is DTW-aligned to it and the
//! length-normalized DTW cost becomes that rater's disparity. Raters above the
//! adjusted fence are rejected and the kept, aligned waveforms are averaged
//! into the continuous MOS, mapped back to the rating scale.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    downsample, dtw_align, rejection_fence, zscore_normalize, ExcludedGroup, Fence, RawStudy,
    WaveformKey, DEFAULT_BAND, FRAME_RATE,
};
use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreeningOptions {
    /// Sakoe–Chiba radius in 1 Hz samples.
    pub band: usize,
    pub frame_rate: usize,
}

impl Default for ScreeningOptions {
    fn default() -> Self {
        Self { band: DEFAULT_BAND, frame_rate: FRAME_RATE }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanWaveform {
    pub mean: Vec<f64>,
    /// Per-sample population standard deviation across the inputs.
    pub std: Vec<f64>,
}

pub fn mean_waveform(waveforms: &[&[f64]]) -> Result<MeanWaveform> {
    let first = waveforms.first().ok_or(Error::Empty("waveform set"))?;
    let n = first.len();
    if let Some(w) = waveforms.iter().find(|w| w.len() != n) {
        return Err(Error::InvalidArgument(alloc::format!(
            "waveform lengths differ ({} vs {n})",
            w.len()
        )));
    }
    let k = waveforms.len() as f64;
    let mean: Vec<f64> = (0..n).map(|t| waveforms.iter().map(|w| w[t]).sum::<f64>() / k).collect();
    let std = (0..n)
        .map(|t| {
            let ss: f64 = waveforms.iter().map(|w| (w[t] - mean[t]) * (w[t] - mean[t])).sum();
            math::sqrt(ss / k)
        })
        .collect();
    Ok(MeanWaveform { mean, std })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RaterDisparity {
    pub subject: String,
    pub session: String,
    pub disparity: f64,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VideoScreening {
    pub video: String,
    pub raters: Vec<RaterDisparity>,
    /// `None` when fewer than four raters saw the video; nobody is rejected then.
    pub fence: Option<Fence>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RejectionReport {
    pub videos: Vec<VideoScreening>,
    /// Subject-sessions dropped before screening (zero variance).
    pub excluded_groups: Vec<ExcludedGroup>,
}

/// Continuous MOS at 1 Hz on the rating scale.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContinuousMos {
    pub video: String,
    pub mos: Vec<f64>,
    pub std: Vec<f64>,
    pub kept: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Screening {
    pub mos: Vec<ContinuousMos>,
    pub report: RejectionReport,
}

pub fn screen_subjects(study: &RawStudy, options: ScreeningOptions) -> Result<Screening> {
    let z = zscore_normalize(study);
    let (scale_mean, scale_std) = study.continuous_scale();

    let mut by_video: BTreeMap<&str, Vec<(&WaveformKey, Vec<f64>)>> = BTreeMap::new();
    for (key, wave) in &z.waveforms {
        by_video
            .entry(key.video.as_str())
            .or_default()
            .push((key, downsample(wave, options.frame_rate)));
    }

    let mut mos = Vec::with_capacity(by_video.len());
    let mut videos = Vec::with_capacity(by_video.len());
    for (video, raters) in by_video {
        let waves: Vec<&[f64]> = raters.iter().map(|(_, w)| w.as_slice()).collect();
        let reference = mean_waveform(&waves)?.mean;
        let mut alignments = Vec::with_capacity(raters.len());
        for (_, w) in &raters {
            alignments.push(dtw_align(w, &reference, options.band)?);
        }
        let disparities: Vec<f64> = alignments.iter().map(|a| a.distance).collect();
        let fence = if disparities.len() >= 4 { Some(rejection_fence(&disparities)?) } else { None };
        let kept: Vec<bool> = disparities
            .iter()
            .map(|&d| fence.map_or(true, |f| d <= f.fence))
            .collect();
        let kept_waves: Vec<&[f64]> = alignments
            .iter()
            .zip(&kept)
            .filter(|(_, &k)| k)
            .map(|(a, _)| a.warped.as_slice())
            .collect();
        if kept_waves.is_empty() {
            return Err(Error::AllRejected(video.into()));
        }
        let pooled = mean_waveform(&kept_waves)?;
        mos.push(ContinuousMos {
            video: video.into(),
            mos: pooled.mean.iter().map(|z| scale_mean + scale_std * z).collect(),
            std: pooled.std.iter().map(|s| scale_std * s).collect(),
            kept: kept_waves.len(),
        });
        videos.push(VideoScreening {
            video: video.into(),
            raters: raters
                .iter()
                .zip(disparities.iter().zip(&kept))
                .map(|((key, _), (&disparity, &kept))| RaterDisparity {
                    subject: key.subject.clone(),
                    session: key.session.clone(),
                    disparity,
                    kept,
                })
                .collect(),
            fence,
        });
    }
    Ok(Screening { mos, report: RejectionReport { videos, excluded_groups: z.excluded } })
}
