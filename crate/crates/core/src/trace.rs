//! Canonical session traces and fixed-width byte bucketing.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{math, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    /// Server to client.
    Downstream,
    Upstream,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PacketRecord {
    /// Seconds since session start.
    pub timestamp: f64,
    /// Bytes on the wire.
    pub length: u64,
    pub direction: Direction,
}

impl PacketRecord {
    pub fn down(timestamp: f64, length: u64) -> Self {
        Self { timestamp, length, direction: Direction::Downstream }
    }

    pub fn up(timestamp: f64, length: u64) -> Self {
        Self { timestamp, length, direction: Direction::Upstream }
    }
}

/// Time-ordered packets of one streaming session.
///
/// Construction validates the record invariants; packets are always sorted
/// non-decreasing by timestamp with equal timestamps kept in input order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SessionTrace {
    video_id: String,
    source_id: String,
    duration: f64,
    packets: Vec<PacketRecord>,
}

impl SessionTrace {
    /// Builds a trace, stably sorting `packets` by timestamp.
    ///
    /// `duration` may be zero only for an empty capture.
    pub fn new(
        video_id: impl Into<String>,
        source_id: impl Into<String>,
        duration: f64,
        mut packets: Vec<PacketRecord>,
    ) -> Result<Self> {
        let source_id = source_id.into();
        if source_id.is_empty() {
            return Err(Error::Validation("source_id must be non-empty".into()));
        }
        if !duration.is_finite() || duration < 0.0 {
            return Err(Error::Validation(format!("duration {duration} is not a non-negative real")));
        }
        if let Some((i, p)) = packets
            .iter()
            .enumerate()
            .find(|(_, p)| !p.timestamp.is_finite() || p.timestamp < 0.0)
        {
            return Err(Error::Validation(format!(
                "packet {i} has invalid timestamp {}",
                p.timestamp
            )));
        }
        packets.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        Ok(Self { video_id: video_id.into(), source_id, duration, packets })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn packets(&self) -> &[PacketRecord] {
        &self.packets
    }

    pub fn with_duration(mut self, duration: f64) -> Result<Self> {
        if !duration.is_finite() || duration < 0.0 {
            return Err(Error::Validation(format!("duration {duration} is not a non-negative real")));
        }
        self.duration = duration;
        Ok(self)
    }

    /// Downstream bytes with timestamp inside `[0, duration)`.
    pub fn downstream_bytes(&self) -> u64 {
        self.packets
            .iter()
            .filter(|p| p.direction == Direction::Downstream && p.timestamp < self.duration)
            .map(|p| p.length)
            .sum()
    }
}

/// Byte totals over consecutive half-open intervals `[k·w, (k+1)·w)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntervalSeries {
    width: f64,
    counts: Vec<u64>,
}

impl IntervalSeries {
    pub fn new(width: f64, counts: Vec<u64>) -> Result<Self> {
        check_width(width)?;
        Ok(Self { width, counts })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }
}

/// Result of [`bucket_bytes`]: the series and how many downstream packets fell
/// at or after the end of playback.
#[derive(Debug, Clone, PartialEq)]
pub struct Bucketed {
    pub series: IntervalSeries,
    pub dropped: usize,
}

fn check_width(width: f64) -> Result<()> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidArgument(format!("interval width must be positive, got {width}")));
    }
    Ok(())
}

/// Number of intervals of `width` covering `[0, duration]`.
///
/// Ratios within 1e-9 of an integer are snapped so `45 / 3` is 15, not 16.
pub fn interval_count(duration: f64, width: f64) -> usize {
    let ratio = duration / width;
    let nearest = libm::round(ratio);
    if (ratio - nearest).abs() <= 1e-9 {
        nearest as usize
    } else {
        math::ceil(ratio) as usize
    }
}

/// Sums downstream packet lengths into `ceil(duration / width)` intervals.
pub fn bucket_bytes(trace: &SessionTrace, width: f64) -> Result<Bucketed> {
    check_width(width)?;
    let n = interval_count(trace.duration, width);
    let mut counts = alloc::vec![0u64; n];
    let mut dropped = 0;
    for p in trace.packets.iter().filter(|p| p.direction == Direction::Downstream) {
        if p.timestamp >= trace.duration {
            dropped += 1;
            continue;
        }
        let k = (math::floor(p.timestamp / width) as usize).min(n.saturating_sub(1));
        counts[k] += p.length;
    }
    Ok(Bucketed { series: IntervalSeries { width, counts }, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trace(duration: f64, packets: Vec<PacketRecord>) -> SessionTrace {
        SessionTrace::new("v", "s", duration, packets).unwrap()
    }

    #[test]
    fn buckets_by_half_open_intervals() {
        let t = trace(
            3.0,
            vec![PacketRecord::down(0.2, 500), PacketRecord::down(0.9, 500), PacketRecord::down(1.1, 200)],
        );
        let b = bucket_bytes(&t, 1.0).unwrap();
        assert_eq!(b.series.counts(), [1000, 200, 0]);
        assert_eq!(b.dropped, 0);
    }

    #[test]
    fn empty_trace_gives_zero_intervals() {
        let b = bucket_bytes(&trace(4.0, vec![]), 2.0).unwrap();
        assert_eq!(b.series.counts(), [0, 0]);
    }

    #[test]
    fn boundary_packet_goes_right() {
        let b = bucket_bytes(&trace(2.0, vec![PacketRecord::down(1.0, 77)]), 1.0).unwrap();
        assert_eq!(b.series.counts(), [0, 77]);
    }

    #[test]
    fn late_and_upstream_packets_are_excluded() {
        let t = trace(
            2.0,
            vec![PacketRecord::down(0.5, 10), PacketRecord::up(0.6, 99), PacketRecord::down(2.0, 5)],
        );
        let b = bucket_bytes(&t, 1.0).unwrap();
        assert_eq!(b.series.counts(), [10, 0]);
        assert_eq!(b.dropped, 1);
        assert_eq!(t.downstream_bytes(), 10);
    }

    #[test]
    fn rejects_bad_width() {
        let t = trace(2.0, vec![]);
        assert!(matches!(bucket_bytes(&t, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(bucket_bytes(&t, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn partial_last_interval() {
        assert_eq!(interval_count(45.0, 3.0), 15);
        assert_eq!(interval_count(45.5, 3.0), 16);
        assert_eq!(interval_count(0.0, 1.0), 0);
        let b = bucket_bytes(&trace(2.5, vec![PacketRecord::down(2.4, 3)]), 1.0).unwrap();
        assert_eq!(b.series.counts(), [0, 0, 3]);
    }

    #[test]
    fn construction_sorts_stably() {
        let t = trace(
            5.0,
            vec![PacketRecord::down(2.0, 1), PacketRecord::down(1.0, 2), PacketRecord::down(1.0, 3)],
        );
        let lens: Vec<u64> = t.packets().iter().map(|p| p.length).collect();
        assert_eq!(lens, [2, 3, 1]);
        assert!(SessionTrace::new("v", "", 1.0, vec![]).is_err());
        assert!(SessionTrace::new("v", "s", 1.0, vec![PacketRecord::down(-1.0, 1)]).is_err());
    }
}
