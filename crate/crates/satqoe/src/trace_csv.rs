//! Pre-bucketed packet traces as CSV.
//!
//! ```text
//! #meta video_id=v01,source_id=src03,duration_s=31.5
//! timestamp_s,bytes,direction
//! 0.0125,1448,down
//! 0.0301,66,up
//! ```
//!
//! The `#meta` row may be replaced or overridden by a sidecar. Other lines
//! starting with `#` are comments.

use std::fmt::Write as _;

use satqoe_core::trace::{Direction, PacketRecord, SessionTrace};

use crate::error::{Error, Result};

pub const HEADER: [&str; 3] = ["timestamp_s", "bytes", "direction"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceMeta {
    pub video_id: Option<String>,
    pub source_id: Option<String>,
    pub duration: Option<f64>,
}

impl TraceMeta {
    fn merged(self, over: Option<&TraceMeta>) -> TraceMeta {
        let Some(o) = over else { return self };
        TraceMeta {
            video_id: o.video_id.clone().or(self.video_id),
            source_id: o.source_id.clone().or(self.source_id),
            duration: o.duration.or(self.duration),
        }
    }
}

fn parse_meta(line: &str, line_no: usize) -> Result<TraceMeta> {
    let mut meta = TraceMeta::default();
    for item in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("row {line_no}: metadata item {item:?} is not key=value")))?;
        match k.trim() {
            "video_id" => meta.video_id = Some(v.trim().to_string()),
            "source_id" => meta.source_id = Some(v.trim().to_string()),
            "duration_s" => {
                meta.duration = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Format(format!("row {line_no}: invalid duration_s {v:?}")))?,
                )
            }
            other => return Err(Error::Format(format!("row {line_no}: unknown metadata key {other:?}"))),
        }
    }
    Ok(meta)
}

/// Parse a trace CSV. Row numbers in errors are physical line numbers.
pub fn parse_trace_csv(text: &str, sidecar: Option<&TraceMeta>) -> Result<SessionTrace> {
    let mut meta = TraceMeta::default();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.trim_start().strip_prefix("#meta") {
            meta = parse_meta(rest, i + 1)?;
            break;
        }
    }
    let meta = meta.merged(sidecar);

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut packets = Vec::new();
    let mut seen_header = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Format(format!("row {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if !seen_header {
            if rec.iter().ne(HEADER) {
                return Err(Error::Format(format!(
                    "row {line}: expected header {:?}, got {:?}",
                    HEADER.join(","),
                    rec.iter().collect::<Vec<_>>().join(",")
                )));
            }
            seen_header = true;
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::Format(format!("row {line}: expected 3 fields, got {}", rec.len())));
        }
        let timestamp: f64 = rec[0]
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite() && *t >= 0.0)
            .ok_or_else(|| Error::Format(format!("row {line}: invalid timestamp")))?;
        let length: u64 = rec[1].parse().map_err(|_| Error::Format(format!("row {line}: invalid bytes")))?;
        let direction = match &rec[2] {
            "down" => Direction::Downstream,
            "up" => Direction::Upstream,
            _ => return Err(Error::Format(format!("row {line}: invalid direction (expected down or up)"))),
        };
        packets.push(PacketRecord { timestamp, length, direction });
    }
    if !seen_header {
        return Err(Error::Format(format!("missing header row {:?}", HEADER.join(","))));
    }
    let duration = meta
        .duration
        .ok_or_else(|| Error::Format("missing duration: no #meta duration_s and no sidecar".into()))?;
    let video_id = meta.video_id.ok_or_else(|| Error::Format("missing video_id".into()))?;
    let source_id = meta.source_id.ok_or_else(|| Error::Format("missing source_id".into()))?;
    Ok(SessionTrace::new(video_id, source_id, duration, packets)?)
}

/// Render with a `#meta` row; the inverse of [`parse_trace_csv`].
pub fn render_csv(trace: &SessionTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "#meta video_id={},source_id={},duration_s={}",
        trace.video_id(),
        trace.source_id(),
        trace.duration()
    );
    out.push_str(&HEADER.join(","));
    out.push('\n');
    for p in trace.packets() {
        let dir = match p.direction {
            Direction::Downstream => "down",
            Direction::Upstream => "up",
        };
        let _ = writeln!(out, "{},{},{}", p.timestamp, p.length, dir);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sidecar(d: f64) -> TraceMeta {
        TraceMeta { video_id: Some("v".into()), source_id: Some("s".into()), duration: Some(d) }
    }

    #[test]
    fn empty_body() {
        let t = parse_trace_csv("timestamp_s,bytes,direction\n", Some(&sidecar(30.0))).unwrap();
        assert!(t.packets().is_empty());
        assert_eq!(t.duration(), 30.0);
    }

    #[test]
    fn sorted_output() {
        let t = parse_trace_csv("timestamp_s,bytes,direction\r\n2.0,10,down\r\n1.0,20,up\r\n", Some(&sidecar(3.0)))
            .unwrap();
        let ts: Vec<f64> = t.packets().iter().map(|p| p.timestamp).collect();
        assert_eq!(ts, [1.0, 2.0]);
    }

    #[test]
    fn bad_timestamp_names_row() {
        let e = parse_trace_csv("timestamp_s,bytes,direction\nabc,100,down\n", Some(&sidecar(3.0))).unwrap_err();
        assert_eq!(e.to_string(), "row 2: invalid timestamp");
        let e = parse_trace_csv("#meta video_id=a,source_id=b,duration_s=3\ntimestamp_s,bytes,direction\n0.5,x,down\n", None)
            .unwrap_err();
        assert_eq!(e.to_string(), "row 3: invalid bytes");
    }

    #[test]
    fn missing_duration() {
        let e = parse_trace_csv("#meta video_id=a,source_id=b\ntimestamp_s,bytes,direction\n", None).unwrap_err();
        assert!(e.to_string().contains("missing duration"));
    }

    #[test]
    fn sidecar_overrides_meta() {
        let t = parse_trace_csv("#meta video_id=a,source_id=b,duration_s=3\ntimestamp_s,bytes,direction\n", Some(&sidecar(9.0)))
            .unwrap();
        assert_eq!((t.video_id(), t.duration()), ("v", 9.0));
    }

    #[test]
    fn round_trip() {
        let packets = vec![
            PacketRecord::down(0.1 + 0.2, 1500),
            PacketRecord::up(1e-7, 40),
            PacketRecord::down(0.1 + 0.2, 7),
            PacketRecord::down(29.999999999999996, 0),
        ];
        let t = SessionTrace::new("v1", "src", 30.000000000000004, packets).unwrap();
        assert_eq!(parse_trace_csv(&render_csv(&t), None).unwrap(), t);
    }
}
