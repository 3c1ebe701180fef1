//! Raw subjective study files.
//!
//! * endpoint scores: `subject,session,video,score`, one retrospective score
//!   per subject and video;
//! * waveforms: `subject,session,video` followed by the 60 Hz samples of one
//!   continuous rating per row (rows may differ in length between videos).

use std::collections::BTreeMap;
use std::path::Path;

use satqoe_core::subjective::{EndpointScores, RawStudy, WaveformKey};

use crate::error::{Error, Result};
use crate::io_util;

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str], exact: bool) -> Result<()> {
    let h = rdr.headers().map_err(|e| Error::Format(e.to_string()))?;
    let cols: Vec<&str> = h.iter().collect();
    let ok = if exact { cols == expected } else { cols.len() >= expected.len() && cols[..expected.len()] == *expected };
    if !ok {
        return Err(Error::Format(format!("row 1: expected header {}, got {}", expected.join(","), cols.join(","))));
    }
    Ok(())
}

pub fn parse_endpoint_csv(text: &str) -> Result<EndpointScores> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["subject", "session", "video", "score"], true)?;
    let mut out = EndpointScores::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(Error::Format(format!("row {line}: expected 4 fields, got {}", rec.len())));
        }
        let score: f64 = rec[3].parse().map_err(|_| Error::Format(format!("row {line}: invalid score {:?}", &rec[3])))?;
        let key = (rec[0].to_string(), rec[2].to_string());
        if out.insert(key, score).is_some() {
            return Err(Error::Format(format!(
                "row {line}: subject {} already scored video {}",
                &rec[0], &rec[2]
            )));
        }
    }
    Ok(out)
}

pub fn parse_waveform_csv(text: &str) -> Result<BTreeMap<WaveformKey, Vec<f64>>> {
    let mut rdr = reader(text);
    check_header(&mut rdr, &["subject", "session", "video"], false)?;
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() < 4 {
            return Err(Error::Format(format!("row {line}: waveform has no samples")));
        }
        let samples = rec
            .iter()
            .skip(3)
            .enumerate()
            .map(|(k, s)| s.parse::<f64>().map_err(|_| Error::Format(format!("row {line}: invalid sample {k} {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        let key = WaveformKey::new(&rec[0], &rec[1], &rec[2]);
        if out.contains_key(&key) {
            return Err(Error::Format(format!("row {line}: duplicate waveform for {}/{}/{}", &rec[0], &rec[1], &rec[2])));
        }
        out.insert(key, samples);
    }
    Ok(out)
}

pub fn render_waveform_csv(waves: &BTreeMap<WaveformKey, Vec<f64>>) -> String {
    let mut out = String::from("subject,session,video\n");
    for (k, w) in waves {
        out.push_str(&format!("{},{},{}", k.subject, k.session, k.video));
        for x in w {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    out
}

pub fn load_study(endpoint: Option<&Path>, waveforms: Option<&Path>) -> Result<RawStudy> {
    let endpoint = match endpoint {
        Some(p) => parse_endpoint_csv(&io_util::read_text(p)?).map_err(|e| e.at(p))?,
        None => EndpointScores::new(),
    };
    let continuous = match waveforms {
        Some(p) => parse_waveform_csv(&io_util::read_text(p)?).map_err(|e| e.at(p))?,
        None => BTreeMap::new(),
    };
    Ok(RawStudy::new(endpoint, continuous, None)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_rows() {
        let s = parse_endpoint_csv("subject,session,video,score\ns1,A,v1,55\ns2,A,v1,60.5\n").unwrap();
        assert_eq!(s[&("s2".to_string(), "v1".to_string())], 60.5);
        let e = parse_endpoint_csv("subject,session,video,score\ns1,A,v1,x\n").unwrap_err();
        assert_eq!(e.to_string(), "row 2: invalid score \"x\"");
        assert!(parse_endpoint_csv("subject,session,video,score\ns1,A,v1,1\ns1,B,v1,2\n").is_err());
    }

    #[test]
    fn waveform_rows_round_trip() {
        let text = "subject,session,video\ns1,A,v1,1,2,3\ns1,A,v2,4,5\n";
        let w = parse_waveform_csv(text).unwrap();
        assert_eq!(w[&WaveformKey::new("s1", "A", "v2")], vec![4.0, 5.0]);
        assert_eq!(parse_waveform_csv(&render_waveform_csv(&w)).unwrap(), w);
    }
}
