//! Per subject-session standardization of continuous ratings.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{RawStudy, WaveformKey};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupStats {
    pub mean: f64,
    /// Sample standard deviation over every frame of the group (N − 1).
    pub std: f64,
    pub frames: usize,
}

/// A subject-session left out of normalization.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExcludedGroup {
    pub subject: String,
    pub session: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZScores {
    pub waveforms: BTreeMap<WaveformKey, Vec<f64>>,
    pub groups: BTreeMap<(String, String), GroupStats>,
    pub excluded: Vec<ExcludedGroup>,
}

/// `z = (s − µ) / σ` with µ and σ pooled across all frames of all videos a
/// subject rated in one session.
pub fn zscore_normalize(study: &RawStudy) -> ZScores {
    let mut grouped: BTreeMap<(String, String), Vec<(&WaveformKey, &Vec<f64>)>> = BTreeMap::new();
    for (key, wave) in study.continuous() {
        grouped
            .entry((key.subject.clone(), key.session.clone()))
            .or_default()
            .push((key, wave));
    }
    let mut out = ZScores { waveforms: BTreeMap::new(), groups: BTreeMap::new(), excluded: Vec::new() };
    for (group, members) in grouped {
        let frames: usize = members.iter().map(|(_, w)| w.len()).sum();
        let exclude = |reason: &str| ExcludedGroup {
            subject: group.0.clone(),
            session: group.1.clone(),
            reason: reason.into(),
        };
        if frames < 2 {
            out.excluded.push(exclude("fewer than two frames"));
            continue;
        }
        let mean = members.iter().flat_map(|(_, w)| w.iter()).sum::<f64>() / frames as f64;
        let ss: f64 = members
            .iter()
            .flat_map(|(_, w)| w.iter())
            .map(|x| (x - mean) * (x - mean))
            .sum();
        let std = math::sqrt(ss / (frames - 1) as f64);
        if std == 0.0 {
            out.excluded.push(exclude("zero variance"));
            continue;
        }
        for (key, wave) in members {
            out.waveforms
                .insert(key.clone(), wave.iter().map(|x| (x - mean) / std).collect());
        }
        out.groups.insert(group, GroupStats { mean, std, frames });
    }
    out
}
