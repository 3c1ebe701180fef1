//! Feature, MOS and prediction tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use satqoe_core::regression::{Dataset, Sample};

use crate::error::{Error, Result};
use crate::io_util;
use crate::provenance::Provenance;

/// One row of a feature CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub video_id: String,
    pub source_id: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    /// Join with MOS by video id; videos without a MOS are skipped.
    pub fn to_dataset(&self, mos: &BTreeMap<String, f64>) -> Result<Dataset> {
        let rows = self
            .rows
            .iter()
            .filter_map(|r| {
                mos.get(&r.video_id).map(|&m| Sample {
                    video_id: r.video_id.clone(),
                    source_id: r.source_id.clone(),
                    features: r.values.clone(),
                    mos: m,
                })
            })
            .collect();
        Ok(Dataset::new(self.names.clone(), rows)?)
    }
}

pub fn render_features(table: &FeatureTable, prov: &Provenance) -> String {
    let mut out = prov.csv_comment();
    out.push_str("video_id,source_id");
    for n in &table.names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for r in &table.rows {
        let _ = write!(out, "{},{}", r.video_id, r.source_id);
        for v in &r.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn fmt_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Format(format!("row {line}: {e}"))
}

pub fn parse_features(text: &str) -> Result<FeatureTable> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(fmt_err)?.clone();
    if headers.len() < 2 || &headers[0] != "video_id" || &headers[1] != "source_id" {
        return Err(Error::Format("feature header must start with video_id,source_id".into()));
    }
    let names: Vec<String> = headers.iter().skip(2).map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(fmt_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let values = rec
            .iter()
            .skip(2)
            .zip(&names)
            .map(|(s, n)| s.parse::<f64>().map_err(|_| Error::Format(format!("row {line}: invalid {n} {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(FeatureRow { video_id: rec[0].to_string(), source_id: rec[1].to_string(), values });
    }
    Ok(FeatureTable { names, rows })
}

pub fn load_features(path: &Path) -> Result<FeatureTable> {
    parse_features(&io_util::read_text(path)?).map_err(|e| e.at(path))
}

/// Per-video ground truth written by `satqoe subjective`.
#[derive(Debug, Clone, PartialEq)]
pub struct MosRow {
    pub video_id: String,
    /// Endpoint MOS recovered from retrospective scores.
    pub mos: Option<f64>,
    /// Time average of the screened continuous MOS.
    pub continuous_mos: Option<f64>,
    pub raters_kept: Option<usize>,
    pub raters_total: Option<usize>,
}

pub const MOS_HEADER: &str = "video_id,mos,continuous_mos,raters_kept,raters_total";

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, |x| x.to_string())
}

pub fn render_mos(rows: &[MosRow], prov: &Provenance) -> String {
    let mut out = prov.csv_comment();
    out.push_str(MOS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.video_id,
            opt(&r.mos),
            opt(&r.continuous_mos),
            opt(&r.raters_kept),
            opt(&r.raters_total)
        );
    }
    out
}

pub fn parse_mos(text: &str) -> Result<Vec<MosRow>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(fmt_err)?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.join(",") != MOS_HEADER {
        return Err(Error::Format(format!("row 1: expected header {MOS_HEADER}")));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(fmt_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let f = |k: usize| -> Result<Option<f64>> {
            if rec[k].is_empty() {
                return Ok(None);
            }
            rec[k].parse().map(Some).map_err(|_| Error::Format(format!("row {line}: invalid {}", cols[k])))
        };
        let u = |k: usize| -> Result<Option<usize>> {
            if rec[k].is_empty() {
                return Ok(None);
            }
            rec[k].parse().map(Some).map_err(|_| Error::Format(format!("row {line}: invalid {}", cols[k])))
        };
        out.push(MosRow {
            video_id: rec[0].to_string(),
            mos: f(1)?,
            continuous_mos: f(2)?,
            raters_kept: u(3)?,
            raters_total: u(4)?,
        });
    }
    Ok(out)
}

pub fn load_mos(path: &Path) -> Result<Vec<MosRow>> {
    parse_mos(&io_util::read_text(path)?).map_err(|e| e.at(path))
}

/// Two-column `video_id,<value>` table, used for predictions and external
/// scores. Any second column name is accepted.
pub fn parse_id_values(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(fmt_err)?.clone();
    if headers.len() != 2 || &headers[0] != "video_id" {
        return Err(Error::Format("row 1: expected header video_id,<value>".into()));
    }
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(fmt_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let v: f64 = rec[1].parse().map_err(|_| Error::Format(format!("row {line}: invalid value {:?}", &rec[1])))?;
        if out.insert(rec[0].to_string(), v).is_some() {
            return Err(Error::Format(format!("row {line}: duplicate video_id {}", &rec[0])));
        }
    }
    Ok(out)
}

pub fn render_id_values(column: &str, values: &[(String, f64)], prov: Option<&Provenance>) -> String {
    let mut out = prov.map(Provenance::csv_comment).unwrap_or_default();
    let _ = writeln!(out, "video_id,{column}");
    for (id, v) in values {
        let _ = writeln!(out, "{id},{v}");
    }
    out
}
