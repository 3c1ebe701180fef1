//! Playback-log descriptors: stalls, bitrate statistics and the logistic
//! MOS-versus-stall-ratio fit.

mod logistic;

pub use logistic::{fit_logistic, logistic, LogisticFit};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::features::IntervalStats;
use crate::{math, Error, Result};

const EDGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stall {
    pub start: f64,
    pub length: f64,
}

impl Stall {
    pub fn end(&self) -> f64 {
        self.start + self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResolutionSwitch {
    pub time: f64,
    pub height: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BitrateSample {
    pub time: f64,
    pub kbps: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlaybackLog {
    video_id: String,
    duration: f64,
    stalls: Vec<Stall>,
    resolution_switches: Vec<ResolutionSwitch>,
    bitrate_samples: Vec<BitrateSample>,
}

impl PlaybackLog {
    /// Validates the log. Stalls are sorted by start; overlapping stalls or
    /// stalls running past the end of playback are rejected.
    pub fn new(
        video_id: impl Into<String>,
        duration: f64,
        mut stalls: Vec<Stall>,
        resolution_switches: Vec<ResolutionSwitch>,
        bitrate_samples: Vec<BitrateSample>,
    ) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Validation(format!("duration {duration} must be positive")));
        }
        stalls.sort_by(|a, b| a.start.total_cmp(&b.start));
        for (i, s) in stalls.iter().enumerate() {
            if !(s.start.is_finite() && s.length.is_finite()) || s.start < 0.0 || s.length < 0.0 {
                return Err(Error::Validation(format!(
                    "stall {i} ({}, {}) has a negative or non-finite field",
                    s.start, s.length
                )));
            }
            if s.end() > duration + EDGE_TOL {
                return Err(Error::Validation(format!(
                    "stall {i} ends at {} after playback end {duration}",
                    s.end()
                )));
            }
        }
        for (i, pair) in stalls.windows(2).enumerate() {
            if pair[1].start < pair[0].end() - EDGE_TOL {
                return Err(Error::Validation(format!(
                    "stalls {i} ({}, {}) and {} ({}, {}) overlap",
                    pair[0].start,
                    pair[0].length,
                    i + 1,
                    pair[1].start,
                    pair[1].length
                )));
            }
        }
        Ok(Self { video_id: video_id.into(), duration, stalls, resolution_switches, bitrate_samples })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn stalls(&self) -> &[Stall] {
        &self.stalls
    }

    pub fn resolution_switches(&self) -> &[ResolutionSwitch] {
        &self.resolution_switches
    }

    pub fn bitrate_samples(&self) -> &[BitrateSample] {
        &self.bitrate_samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum StallClass {
    /// Under 2 s.
    Short,
    /// 2 s to 5 s inclusive.
    Medium,
    /// Over 5 s.
    Long,
}

impl StallClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StallClass::Short => "short",
            StallClass::Medium => "medium",
            StallClass::Long => "long",
        }
    }
}

pub fn classify_stall_duration(seconds: f64) -> Result<StallClass> {
    if seconds.is_nan() || seconds < 0.0 {
        return Err(Error::InvalidArgument(format!("stall duration {seconds} is negative")));
    }
    Ok(if seconds < 2.0 {
        StallClass::Short
    } else if seconds <= 5.0 {
        StallClass::Medium
    } else {
        StallClass::Long
    })
}

/// Positional fields are `None` when the log has no stalls.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StallFeatures {
    pub count: usize,
    pub total: f64,
    pub ratio: f64,
    pub mean_len: Option<f64>,
    /// Start of the first stall, percent of duration.
    pub first_pos_pct: Option<f64>,
    /// End of the last stall, percent of duration.
    pub last_end_pct: Option<f64>,
    pub class: Option<StallClass>,
}

pub fn stall_features(log: &PlaybackLog) -> Result<StallFeatures> {
    let stalls = log.stalls();
    let count = stalls.len();
    let total: f64 = stalls.iter().map(|s| s.length).sum();
    let d = log.duration();
    let mean_len = (count > 0).then(|| total / count as f64);
    Ok(StallFeatures {
        count,
        total,
        ratio: (total / d).clamp(0.0, 1.0),
        mean_len,
        first_pos_pct: stalls.first().map(|s| 100.0 * s.start / d),
        last_end_pct: stalls.last().map(|s| 100.0 * s.end() / d),
        class: mean_len.map(classify_stall_duration).transpose()?,
    })
}

/// Unweighted statistics of the bitrate samples (kbps); std divides by N.
pub fn bitrate_stats(log: &PlaybackLog) -> Result<IntervalStats> {
    let values: Vec<f64> = log.bitrate_samples().iter().map(|b| b.kbps).collect();
    if values.is_empty() {
        return Err(Error::Empty("bitrate samples"));
    }
    let sorted = math::sorted(&values);
    Ok(IntervalStats {
        mean: math::mean(&values).unwrap_or(0.0),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median: math::median_sorted(&sorted).unwrap_or(0.0),
        std: math::population_std(&values).unwrap_or(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn log(duration: f64, stalls: &[(f64, f64)]) -> Result<PlaybackLog> {
        PlaybackLog::new(
            "v",
            duration,
            stalls.iter().map(|&(start, length)| Stall { start, length }).collect(),
            vec![],
            vec![],
        )
    }

    #[test]
    fn no_stalls() {
        let f = stall_features(&log(40.0, &[]).unwrap()).unwrap();
        assert_eq!((f.count, f.total, f.ratio), (0, 0.0, 0.0));
        assert!(f.first_pos_pct.is_none() && f.last_end_pct.is_none() && f.class.is_none());
    }

    #[test]
    fn single_stall() {
        let f = stall_features(&log(40.0, &[(10.0, 2.0)]).unwrap()).unwrap();
        assert_eq!(f.count, 1);
        assert_eq!(f.ratio, 0.05);
        assert_eq!(f.first_pos_pct, Some(25.0));
        assert_eq!(f.last_end_pct, Some(30.0));
        assert_eq!(f.class, Some(StallClass::Medium));
    }

    #[test]
    fn two_stalls_land_on_medium_boundary() {
        let f = stall_features(&log(50.0, &[(20.0, 3.0), (5.0, 1.0)]).unwrap()).unwrap();
        assert_eq!((f.count, f.total, f.mean_len), (2, 4.0, Some(2.0)));
        assert_eq!(f.class, Some(StallClass::Medium));
        assert_eq!(f.first_pos_pct, Some(10.0));
        assert_eq!(f.last_end_pct, Some(46.0));
    }

    #[test]
    fn overlapping_stalls_rejected() {
        let err = log(50.0, &[(5.0, 3.0), (6.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("stalls 0") && m.contains("overlap")));
        assert!(log(10.0, &[(9.0, 2.0)]).is_err());
    }

    #[test]
    fn stall_bins() {
        assert_eq!(classify_stall_duration(1.0).unwrap(), StallClass::Short);
        assert_eq!(classify_stall_duration(2.0).unwrap(), StallClass::Medium);
        assert_eq!(classify_stall_duration(5.0).unwrap(), StallClass::Medium);
        assert_eq!(classify_stall_duration(7.67).unwrap(), StallClass::Long);
        assert_eq!(classify_stall_duration(0.0).unwrap(), StallClass::Short);
        assert!(classify_stall_duration(-0.1).is_err());
    }

    #[test]
    fn bitrate_examples() {
        let mk = |kbps: &[f64]| {
            PlaybackLog::new(
                "v",
                10.0,
                vec![],
                vec![],
                kbps.iter().enumerate().map(|(i, &k)| BitrateSample { time: i as f64, kbps: k }).collect(),
            )
            .unwrap()
        };
        let s = bitrate_stats(&mk(&[1000.0])).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.median, s.std), (1000.0, 1000.0, 1000.0, 1000.0, 0.0));
        let s = bitrate_stats(&mk(&[500.0, 1500.0])).unwrap();
        assert_eq!((s.mean, s.std), (1000.0, 500.0));
        assert!(matches!(bitrate_stats(&mk(&[])), Err(Error::Empty(_))));
    }

    proptest::proptest! {
        #[test]
        fn ratio_invariant_under_rescaling(
            gaps in proptest::collection::vec((0.0f64..5.0, 0.0f64..3.0), 0..6),
            tail in 0.1f64..10.0,
            scale in 0.1f64..10.0,
        ) {
            let mut t = 0.0;
            let mut stalls = vec![];
            for (gap, len) in gaps {
                t += gap;
                stalls.push((t, len));
                t += len;
            }
            let duration = t + tail;
            let a = stall_features(&log(duration, &stalls).unwrap()).unwrap();
            let scaled: Vec<_> = stalls.iter().map(|&(s, l)| (s * scale, l * scale)).collect();
            let b = stall_features(&log(duration * scale, &scaled).unwrap()).unwrap();
            proptest::prop_assert!((a.ratio - b.ratio).abs() < 1e-12);
        }

        #[test]
        fn classification_is_monotone(a in 0.0f64..20.0, b in 0.0f64..20.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            proptest::prop_assert!(classify_stall_duration(lo).unwrap() <= classify_stall_duration(hi).unwrap());
        }
    }
}
