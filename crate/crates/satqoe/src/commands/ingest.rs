use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use satqoe_core::features::BASELINE_WINDOWS;
use satqoe_core::trace::{bucket_bytes, SessionTrace};
use serde_json::json;

use super::{Summary, INTERVALS_FILE, TRACES_DIR};
use crate::catalog::{load_catalog, Catalog};
use crate::config::Loaded;
use crate::error::{Error, Result};
use crate::io_util;
use crate::pcap::{parse_pcap, Classifier, PcapOptions};
use crate::trace_csv::{parse_trace_csv, render_csv, TraceMeta};

fn from_pcap(path: &Path, catalog: Option<&Catalog>, lenient: bool) -> Result<SessionTrace> {
    let video_id = io_util::file_stem(path);
    let entry = catalog
        .and_then(|c| c.get(&video_id))
        .ok_or_else(|| Error::parse(path, format!("video {video_id} is not in the catalog (source_id and duration are required)")))?;
    let mut opts = PcapOptions::new(&video_id, &entry.source_id);
    opts.duration = Some(entry.duration);
    opts.lenient = lenient;
    if let Some(ip) = entry.client_ip {
        opts.classifier = Classifier::ClientIp(ip);
    }
    let bytes = io_util::read_bytes(path)?;
    let parsed = parse_pcap(&bytes, &opts).map_err(|e| match e {
        Error::Core(c) => Error::parse(path, c.to_string()),
        Error::Pcap { .. } | Error::PcapTruncated { .. } => Error::parse(path, e.to_string()),
        other => other,
    })?;
    Ok(parsed.trace)
}

fn from_csv(path: &Path, catalog: Option<&Catalog>) -> Result<SessionTrace> {
    let stem = io_util::file_stem(path);
    let sidecar = catalog.and_then(|c| c.get(&stem)).map(|e| TraceMeta {
        video_id: Some(e.video_id.clone()),
        source_id: Some(e.source_id.clone()),
        duration: Some(e.duration),
    });
    parse_trace_csv(&io_util::read_text(path)?, sidecar.as_ref()).map_err(|e| match e {
        Error::Core(c) => Error::parse(path, c.to_string()),
        other => other.at(path),
    })
}

pub fn cmd_ingest(cfg: &Loaded) -> Result<Summary> {
    let inputs = &cfg.config.inputs;
    let catalog = cfg.input(&inputs.catalog).map(|p| load_catalog(&p)).transpose()?;
    let pcap_dir = cfg.input(&inputs.pcap_dir);
    let trace_dir = cfg.input(&inputs.trace_dir);
    if pcap_dir.is_none() && trace_dir.is_none() {
        return Err(Error::Config("ingest needs inputs.pcap_dir or inputs.trace_dir".into()));
    }

    let mut traces = Vec::new();
    if let Some(dir) = &pcap_dir {
        for path in io_util::list_files(dir, "pcap")? {
            traces.push(from_pcap(&path, catalog.as_ref(), inputs.lenient_pcap)?);
        }
    }
    if let Some(dir) = &trace_dir {
        for path in io_util::list_files(dir, "csv")? {
            traces.push(from_csv(&path, catalog.as_ref())?);
        }
    }
    if traces.is_empty() {
        let dirs: Vec<String> = pcap_dir.iter().chain(&trace_dir).map(|d| d.display().to_string()).collect();
        return Err(Error::Usage(format!("no captures or trace CSVs found in {}", dirs.join(", "))));
    }
    let mut seen = BTreeSet::new();
    for t in &traces {
        if !seen.insert(t.video_id().to_string()) {
            return Err(Error::Usage(format!("video {} appears more than once in the inputs", t.video_id())));
        }
    }
    traces.sort_by(|a, b| a.video_id().cmp(b.video_id()));

    let prov = cfg.provenance();
    let out_dir = cfg.out(TRACES_DIR);
    if out_dir.exists() {
        for stale in io_util::list_files(&out_dir, "csv")? {
            fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
        }
    }
    let mut intervals = prov.csv_comment();
    intervals.push_str("video_id,width_s,interval,bytes\n");
    let mut dropped = 0usize;
    let mut packets = 0usize;
    for t in &traces {
        let mut text = prov.csv_comment();
        text.push_str(&render_csv(t));
        io_util::write_text(&out_dir.join(format!("{}.csv", t.video_id())), &text)?;
        packets += t.packets().len();
        for w in BASELINE_WINDOWS {
            let b = bucket_bytes(t, f64::from(w))?;
            if w == 1 {
                dropped += b.dropped;
            }
            for (k, c) in b.series.counts().iter().enumerate() {
                let _ = writeln!(intervals, "{},{w},{k},{c}", t.video_id());
            }
        }
    }
    io_util::write_text(&cfg.out(INTERVALS_FILE), &intervals)?;
    Ok(json!({
        "status": "ok",
        "command": "ingest",
        "videos": traces.len(),
        "packets": packets,
        "dropped_after_duration": dropped,
        "outputs": [out_dir.display().to_string(), cfg.out(INTERVALS_FILE).display().to_string()],
    }))
}
