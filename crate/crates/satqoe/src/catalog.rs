//! Video catalog: `video_id,source_id,duration_s[,client_ip]`.
//!
//! Supplies the content id and playback duration that a capture file does
//! not carry.

use std::collections::BTreeMap;
use std::net::IpAddr;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io_util;

#[derive(Debug, Clone, PartialEq)]
pub struct VideoEntry {
    pub video_id: String,
    pub source_id: String,
    pub duration: f64,
    pub client_ip: Option<IpAddr>,
}

pub type Catalog = BTreeMap<String, VideoEntry>;

pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 3 || cols[..3] != ["video_id", "source_id", "duration_s"] || (cols.len() == 4 && cols[3] != "client_ip") || cols.len() > 4 {
        return Err(Error::Format(format!(
            "row 1: expected header video_id,source_id,duration_s[,client_ip], got {}",
            cols.join(",")
        )));
    }
    let mut out = Catalog::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() < 3 {
            return Err(Error::Format(format!("row {line}: expected at least 3 fields")));
        }
        let duration: f64 = rec[2]
            .parse()
            .ok()
            .filter(|d: &f64| d.is_finite() && *d > 0.0)
            .ok_or_else(|| Error::Format(format!("row {line}: invalid duration_s")))?;
        let client_ip = match rec.get(3).filter(|s| !s.is_empty()) {
            Some(s) => Some(s.parse().map_err(|_| Error::Format(format!("row {line}: invalid client_ip {s:?}")))?),
            None => None,
        };
        if rec[1].is_empty() {
            return Err(Error::Format(format!("row {line}: empty source_id")));
        }
        let entry = VideoEntry { video_id: rec[0].to_string(), source_id: rec[1].to_string(), duration, client_ip };
        if out.insert(entry.video_id.clone(), entry).is_some() {
            return Err(Error::Format(format!("row {line}: duplicate video_id {}", &rec[0])));
        }
    }
    Ok(out)
}

pub fn load_catalog(path: &Path) -> Result<Catalog> {
    parse_catalog(&io_util::read_text(path)?).map_err(|e| e.at(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_optional_ip() {
        let c = parse_catalog("video_id,source_id,duration_s,client_ip\na,s1,30,10.0.0.2\nb,s1,31.5,\n").unwrap();
        assert_eq!(c["a"].client_ip, Some("10.0.0.2".parse().unwrap()));
        assert_eq!(c["b"].duration, 31.5);
        assert!(parse_catalog("video_id,source_id,duration_s\na,s1,0\n").is_err());
        assert!(parse_catalog("video_id,source_id,duration_s\na,s1,3\na,s2,3\n").is_err());
    }
}
