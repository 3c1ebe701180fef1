//! Baseline network measurements (BNM) and temporal byte sequences.
//!
//! Column order of a serialized vector is fixed:
//!
//! 1. for each window `w` in 1 s, 2 s, 3 s: `bytes_{w}s_mean`, `_min`, `_max`,
//!    `_median`, `_std` of the per-interval byte counts;
//! 2. `overall_throughput` (downstream bytes / duration, B/s),
//!    `peak_throughput_2s` (largest 2 s count / 2, B/s), `max_bytes_2s`,
//!    `idle_ratio` (share of empty 1 s intervals);
//! 3. optionally `bytes_1s_t000 ..` (one entry per second) and
//!    `bytes_3s_t000 ..` (one per 3 s), zero-padded on the right or truncated
//!    to the configured lengths (60 and 20 by default).
//!
//! Standard deviations divide by N; even-length medians are midpoint averages.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::trace::{bucket_bytes, IntervalSeries, SessionTrace};
use crate::{math, Error, Result};

/// Window widths, in seconds, whose interval statistics make up the baseline.
pub const BASELINE_WINDOWS: [u32; 3] = [1, 2, 3];

/// Number of baseline columns.
pub const BASELINE_ARITY: usize = BASELINE_WINDOWS.len() * 5 + 4;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntervalStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub std: f64,
}

pub fn interval_stats(series: &IntervalSeries) -> Result<IntervalStats> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("interval series is empty".into()));
    }
    let values = series.as_f64();
    let sorted = math::sorted(&values);
    Ok(IntervalStats {
        mean: math::mean(&values).unwrap_or(0.0),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median: math::median_sorted(&sorted).unwrap_or(0.0),
        std: math::population_std(&values).unwrap_or(0.0),
    })
}

/// Fraction of intervals in which no byte arrived.
pub fn idle_ratio(series: &IntervalSeries) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("interval series is empty".into()));
    }
    let idle = series.counts().iter().filter(|&&c| c == 0).count();
    Ok(idle as f64 / series.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Throughput {
    /// Total bytes over the covered span `n · width`, B/s.
    pub overall: f64,
    pub per_interval: Vec<f64>,
    pub peak: f64,
}

pub fn throughput(series: &IntervalSeries) -> Result<Throughput> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("interval series is empty".into()));
    }
    let w = series.width();
    let per_interval: Vec<f64> = series.counts().iter().map(|&c| c as f64 / w).collect();
    let overall = series.total() as f64 / (series.len() as f64 * w);
    let peak = per_interval.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Throughput { overall, per_interval, peak })
}

/// The three feature sets compared in the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FeatureSet {
    #[cfg_attr(feature = "serde", serde(rename = "baseline"))]
    Baseline,
    /// Baseline plus bytes per second.
    #[cfg_attr(feature = "serde", serde(rename = "b1s"))]
    BaselineBytes1s,
    /// Baseline plus bytes per second and bytes per 3 seconds.
    #[cfg_attr(feature = "serde", serde(rename = "b1s3s"))]
    BaselineBytes1s3s,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] =
        [FeatureSet::Baseline, FeatureSet::BaselineBytes1s, FeatureSet::BaselineBytes1s3s];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Baseline => "baseline",
            FeatureSet::BaselineBytes1s => "b1s",
            FeatureSet::BaselineBytes1s3s => "b1s3s",
        }
    }

    pub fn includes_1s(self) -> bool {
        !matches!(self, FeatureSet::Baseline)
    }

    pub fn includes_3s(self) -> bool {
        matches!(self, FeatureSet::BaselineBytes1s3s)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(FeatureSet::Baseline),
            "b1s" => Ok(FeatureSet::BaselineBytes1s),
            "b1s3s" => Ok(FeatureSet::BaselineBytes1s3s),
            other => Err(Error::InvalidArgument(format!(
                "unknown feature set {other:?} (expected baseline, b1s or b1s3s)"
            ))),
        }
    }
}

/// Lengths of the temporal sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemporalLengths {
    pub per_1s: usize,
    pub per_3s: usize,
}

impl Default for TemporalLengths {
    fn default() -> Self {
        Self { per_1s: 60, per_3s: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineFeatures {
    /// Statistics of [`BASELINE_WINDOWS`], in that order.
    pub windows: Vec<IntervalStats>,
    pub overall_throughput: f64,
    pub peak_throughput_2s: f64,
    pub max_bytes_2s: f64,
    pub idle_ratio: f64,
}

impl BaselineFeatures {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(BASELINE_ARITY);
        for s in &self.windows {
            out.extend_from_slice(&[s.mean, s.min, s.max, s.median, s.std]);
        }
        out.extend_from_slice(&[
            self.overall_throughput,
            self.peak_throughput_2s,
            self.max_bytes_2s,
            self.idle_ratio,
        ]);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureVector {
    pub video_id: String,
    pub baseline: BaselineFeatures,
    pub temporal_1s: Option<Vec<f64>>,
    pub temporal_3s: Option<Vec<f64>>,
}

impl FeatureVector {
    /// Flattens into the documented column order.
    pub fn to_row(&self) -> Vec<f64> {
        let mut row = self.baseline.to_vec();
        if let Some(t) = &self.temporal_1s {
            row.extend_from_slice(t);
        }
        if let Some(t) = &self.temporal_3s {
            row.extend_from_slice(t);
        }
        row
    }
}

/// Column names matching [`FeatureVector::to_row`] for `set`.
pub fn column_names(set: FeatureSet, lengths: TemporalLengths) -> Vec<String> {
    let mut names = Vec::new();
    for w in BASELINE_WINDOWS {
        for stat in ["mean", "min", "max", "median", "std"] {
            names.push(format!("bytes_{w}s_{stat}"));
        }
    }
    for n in ["overall_throughput", "peak_throughput_2s", "max_bytes_2s", "idle_ratio"] {
        names.push(n.to_string());
    }
    if set.includes_1s() {
        names.extend((0..lengths.per_1s).map(|k| format!("bytes_1s_t{k:03}")));
    }
    if set.includes_3s() {
        names.extend((0..lengths.per_3s).map(|k| format!("bytes_3s_t{k:03}")));
    }
    names
}

fn padded(series: &IntervalSeries, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = series.counts().iter().take(len).map(|&c| c as f64).collect();
    v.resize(len, 0.0);
    v
}

pub fn build_feature_vector(
    trace: &SessionTrace,
    set: FeatureSet,
    lengths: TemporalLengths,
) -> Result<FeatureVector> {
    let mut per_window = Vec::with_capacity(BASELINE_WINDOWS.len());
    let mut series_1s = None;
    let mut series_2s = None;
    let mut series_3s = None;
    for w in BASELINE_WINDOWS {
        let series = bucket_bytes(trace, f64::from(w))?.series;
        per_window.push(interval_stats(&series)?);
        match w {
            1 => series_1s = Some(series),
            2 => series_2s = Some(series),
            _ => series_3s = Some(series),
        }
    }
    let (s1, s2, s3) = match (series_1s, series_2s, series_3s) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => unreachable!("BASELINE_WINDOWS covers 1, 2 and 3 s"),
    };
    let overall_throughput = if trace.duration() > 0.0 {
        trace.downstream_bytes() as f64 / trace.duration()
    } else {
        0.0
    };
    let peak = throughput(&s2)?.peak;
    let baseline = BaselineFeatures {
        windows: per_window,
        overall_throughput,
        peak_throughput_2s: peak,
        max_bytes_2s: peak * s2.width(),
        idle_ratio: idle_ratio(&s1)?,
    };
    Ok(FeatureVector {
        video_id: trace.video_id().to_string(),
        baseline,
        temporal_1s: set.includes_1s().then(|| padded(&s1, lengths.per_1s)),
        temporal_3s: set.includes_3s().then(|| padded(&s3, lengths.per_3s)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::PacketRecord;
    use alloc::vec;

    fn series(width: f64, counts: &[u64]) -> IntervalSeries {
        IntervalSeries::new(width, counts.to_vec()).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = interval_stats(&series(1.0, &[0, 0, 0])).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.median, s.std), (0.0, 0.0, 0.0, 0.0, 0.0));
        let s = interval_stats(&series(1.0, &[100, 300])).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.median, s.std), (200.0, 100.0, 300.0, 200.0, 100.0));
        let s = interval_stats(&series(1.0, &[5])).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.median, s.std), (5.0, 5.0, 5.0, 5.0, 0.0));
        assert!(interval_stats(&series(1.0, &[])).is_err());
    }

    #[test]
    fn idle_examples() {
        assert_eq!(idle_ratio(&series(1.0, &[0, 0, 0, 0])).unwrap(), 1.0);
        assert_eq!(idle_ratio(&series(1.0, &[10, 0, 0, 5])).unwrap(), 0.5);
        assert_eq!(idle_ratio(&series(1.0, &[1, 1])).unwrap(), 0.0);
        assert!(idle_ratio(&series(1.0, &[])).is_err());
    }

    #[test]
    fn throughput_examples() {
        let t = throughput(&series(2.0, &[2000, 4000])).unwrap();
        assert_eq!(t.per_interval, [1000.0, 2000.0]);
        assert_eq!((t.overall, t.peak), (1500.0, 2000.0));
        let t = throughput(&series(2.0, &[0, 0])).unwrap();
        assert_eq!((t.overall, t.peak), (0.0, 0.0));
        let t = throughput(&series(0.5, &[7])).unwrap();
        assert_eq!((t.overall, t.peak), (14.0, 14.0));
    }

    #[test]
    fn empty_trace_vector() {
        let trace = SessionTrace::new("v", "s", 30.0, vec![]).unwrap();
        let fv = build_feature_vector(&trace, FeatureSet::BaselineBytes1s, TemporalLengths::default())
            .unwrap();
        assert!(fv.baseline.to_vec()[..BASELINE_ARITY - 1].iter().all(|&x| x == 0.0));
        assert_eq!(fv.baseline.idle_ratio, 1.0);
        assert_eq!(fv.temporal_1s.as_deref(), Some(&[0.0; 60][..]));
        assert!(fv.temporal_3s.is_none());
    }

    #[test]
    fn baseline_set_has_documented_arity() {
        let trace = SessionTrace::new("v", "s", 10.0, vec![PacketRecord::down(1.0, 10)]).unwrap();
        let fv = build_feature_vector(&trace, FeatureSet::Baseline, TemporalLengths::default()).unwrap();
        assert!(fv.temporal_1s.is_none() && fv.temporal_3s.is_none());
        assert_eq!(fv.to_row().len(), BASELINE_ARITY);
        assert_eq!(column_names(FeatureSet::Baseline, TemporalLengths::default()).len(), BASELINE_ARITY);
        assert_eq!(
            column_names(FeatureSet::BaselineBytes1s3s, TemporalLengths::default()).len(),
            BASELINE_ARITY + 80
        );
    }

    #[test]
    fn uniform_45s_trace_is_zero_padded() {
        // two 500 B packets per second for 45 s
        let packets = (0..90).map(|k| PacketRecord::down(k as f64 * 0.5, 500)).collect();
        let trace = SessionTrace::new("v", "s", 45.0, packets).unwrap();
        let fv = build_feature_vector(&trace, FeatureSet::BaselineBytes1s3s, TemporalLengths::default())
            .unwrap();
        let t1 = fv.temporal_1s.unwrap();
        assert_eq!(t1.len(), 60);
        assert!(t1[..45].iter().all(|&x| x == 1000.0));
        assert!(t1[45..].iter().all(|&x| x == 0.0));
        let t3 = fv.temporal_3s.unwrap();
        assert_eq!(t3.len(), 20);
        assert!(t3[..15].iter().all(|&x| x == 3000.0));
        assert!(t3[15..].iter().all(|&x| x == 0.0));
        assert_eq!(fv.baseline.overall_throughput, 1000.0);
        assert_eq!(fv.baseline.max_bytes_2s, 2000.0);
        assert_eq!(fv.baseline.peak_throughput_2s, 1000.0);
        assert_eq!(fv.baseline.idle_ratio, 0.0);
    }

    #[test]
    fn long_sequences_truncate() {
        let packets = (0..70).map(|k| PacketRecord::down(k as f64, 1)).collect();
        let trace = SessionTrace::new("v", "s", 70.0, packets).unwrap();
        let fv = build_feature_vector(
            &trace,
            FeatureSet::BaselineBytes1s3s,
            TemporalLengths { per_1s: 60, per_3s: 20 },
        )
        .unwrap();
        assert_eq!(fv.temporal_1s.unwrap(), [1.0; 60]);
        assert_eq!(fv.temporal_3s.unwrap(), [3.0; 20]);
    }

    #[test]
    fn feature_set_names_round_trip() {
        for s in FeatureSet::ALL {
            assert_eq!(s.as_str().parse::<FeatureSet>().unwrap(), s);
        }
        assert!("b3s".parse::<FeatureSet>().is_err());
    }
}
