use std::collections::BTreeMap;
use std::fmt::Write as _;

use satqoe_core::math;
use satqoe_core::session::{bitrate_stats, fit_logistic, stall_features, PlaybackLog};
use satqoe_core::subjective::{screen_subjects, sureal_recover, RecoveredQuality, RejectionReport, SurealOptions};
use serde::Serialize;
use serde_json::json;

use super::{Summary, MOS_FILE};
use crate::catalog::load_catalog;
use crate::config::Loaded;
use crate::error::{Error, Result};
use crate::io_util;
use crate::playback::load_playback_dir;
use crate::provenance::Provenance;
use crate::study::load_study;
use crate::tables::{render_mos, MosRow};

pub(crate) const CONTINUOUS_FILE: &str = "continuous_mos.csv";
pub(crate) const SUBJECTIVE_REPORT: &str = "subjective_report.json";
pub(crate) const SESSION_FILE: &str = "session_stats.csv";
pub(crate) const ANALYSIS_FILE: &str = "analysis.json";

#[derive(Serialize)]
struct EndpointRecovery<'a> {
    #[serde(flatten)]
    quality: &'a RecoveredQuality,
    /// ψ mapped onto the rating scale, aligned with `videos`.
    mos: &'a [f64],
}

#[derive(Serialize)]
struct SubjectiveReport<'a> {
    provenance: &'a Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    endpoint: Option<EndpointRecovery<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    screening: Option<&'a RejectionReport>,
}

pub fn cmd_subjective(cfg: &Loaded) -> Result<Summary> {
    let inputs = &cfg.config.inputs;
    let endpoint_path = cfg.input(&inputs.endpoint_scores);
    let wave_path = cfg.input(&inputs.waveforms);
    if endpoint_path.is_none() && wave_path.is_none() {
        return Err(Error::Config("subjective needs inputs.endpoint_scores and/or inputs.waveforms".into()));
    }
    let study = load_study(endpoint_path.as_deref(), wave_path.as_deref())?;
    let prov = cfg.provenance();

    let recovered = match endpoint_path {
        Some(_) => {
            let q = sureal_recover(study.endpoint(), SurealOptions::default())?;
            let mos = q.rescaled_to_raw_means(study.endpoint());
            Some((q, mos))
        }
        None => None,
    };
    let screening = match wave_path {
        Some(_) => Some(screen_subjects(&study, cfg.config.subjective.screening())?),
        None => None,
    };

    let mut rows: BTreeMap<String, MosRow> = BTreeMap::new();
    if let Some((q, mos)) = &recovered {
        for (v, m) in q.videos.iter().zip(mos) {
            entry(&mut rows, v).mos = Some(*m);
        }
    }
    let mut continuous = prov.csv_comment();
    continuous.push_str("video_id,second,mos,std\n");
    if let Some(s) = &screening {
        for c in &s.mos {
            let e = entry(&mut rows, &c.video);
            e.continuous_mos = math::mean(&c.mos);
            e.raters_kept = Some(c.kept);
            for (k, (m, sd)) in c.mos.iter().zip(&c.std).enumerate() {
                let _ = writeln!(continuous, "{},{k},{m},{sd}", c.video);
            }
        }
        for v in &s.report.videos {
            entry(&mut rows, &v.video).raters_total = Some(v.raters.len());
        }
    }
    let rows: Vec<MosRow> = rows.into_values().collect();
    let mut outputs = vec![cfg.out(MOS_FILE)];
    io_util::write_text(&cfg.out(MOS_FILE), &render_mos(&rows, &prov))?;
    if screening.is_some() {
        io_util::write_text(&cfg.out(CONTINUOUS_FILE), &continuous)?;
        outputs.push(cfg.out(CONTINUOUS_FILE));
    }
    let report = SubjectiveReport {
        provenance: &prov,
        endpoint: recovered.as_ref().map(|(q, mos)| EndpointRecovery { quality: q, mos }),
        screening: screening.as_ref().map(|s| &s.report),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    io_util::write_text(&cfg.out(SUBJECTIVE_REPORT), &text)?;
    outputs.push(cfg.out(SUBJECTIVE_REPORT));

    let rejected: usize = screening
        .as_ref()
        .map_or(0, |s| s.report.videos.iter().map(|v| v.raters.iter().filter(|r| !r.kept).count()).sum());

    if let Some(dir) = cfg.input(&inputs.playback_dir) {
        let logs = load_playback_dir(&dir)?;
        let catalog = cfg.input(&inputs.catalog).map(|p| load_catalog(&p)).transpose()?;
        let sources: BTreeMap<String, String> = catalog
            .map(|c| c.into_values().map(|e| (e.video_id, e.source_id)).collect())
            .unwrap_or_default();
        session_outputs(cfg, &prov, &logs, &rows, &sources)?;
        outputs.push(cfg.out(SESSION_FILE));
        outputs.push(cfg.out(ANALYSIS_FILE));
    }

    Ok(json!({
        "status": "ok",
        "command": "subjective",
        "videos": rows.len(),
        "rejected_waveforms": rejected,
        "sureal_converged": recovered.as_ref().map(|(q, _)| q.converged),
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    }))
}

fn entry<'a>(rows: &'a mut BTreeMap<String, MosRow>, id: &str) -> &'a mut MosRow {
    rows.entry(id.to_string()).or_insert_with(|| MosRow {
        video_id: id.to_string(),
        mos: None,
        continuous_mos: None,
        raters_kept: None,
        raters_total: None,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Per-video playback descriptors and their relation to MOS.
fn session_outputs(
    cfg: &Loaded,
    prov: &Provenance,
    logs: &[PlaybackLog],
    mos_rows: &[MosRow],
    sources: &BTreeMap<String, String>,
) -> Result<()> {
    let mos: BTreeMap<&str, f64> = mos_rows
        .iter()
        .filter_map(|r| r.mos.or(r.continuous_mos).map(|m| (r.video_id.as_str(), m)))
        .collect();
    let mut csv = prov.csv_comment();
    csv.push_str(
        "video_id,duration_s,stall_count,stall_total_s,stall_ratio,stall_mean_len_s,first_stall_pct,last_stall_end_pct,stall_class,\
         bitrate_min,bitrate_max,bitrate_median,bitrate_mean,bitrate_std,resolution_switches\n",
    );
    let mut paired = Vec::new();
    for log in logs {
        let s = stall_features(log)?;
        let b = bitrate_stats(log).ok();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            log.video_id(),
            log.duration(),
            s.count,
            s.total,
            s.ratio,
            opt(s.mean_len),
            opt(s.first_pos_pct),
            opt(s.last_end_pct),
            s.class.map_or("", |c| c.as_str()),
            opt(b.map(|b| b.min)),
            opt(b.map(|b| b.max)),
            opt(b.map(|b| b.median)),
            opt(b.map(|b| b.mean)),
            opt(b.map(|b| b.std)),
            log.resolution_switches().windows(2).filter(|w| w[0].height != w[1].height).count(),
        );
        if let Some(&m) = mos.get(log.video_id()) {
            paired.push((log.video_id().to_string(), s.ratio, b.map(|b| b.mean), m));
        }
    }
    io_util::write_text(&cfg.out(SESSION_FILE), &csv)?;

    let with_bitrate: Vec<(&str, f64, f64)> =
        paired.iter().filter_map(|(v, _, b, m)| b.map(|b| (v.as_str(), b, *m))).collect();
    let bx: Vec<f64> = with_bitrate.iter().map(|x| x.1).collect();
    let by: Vec<f64> = with_bitrate.iter().map(|x| x.2).collect();
    let raw = math::pearson(&bx, &by);
    // bitrate relative to the best-served clip of the same source
    let mut max_per_source: BTreeMap<&str, f64> = BTreeMap::new();
    for (v, b, _) in &with_bitrate {
        if let Some(s) = sources.get(*v) {
            let e = max_per_source.entry(s.as_str()).or_insert(f64::NEG_INFINITY);
            *e = e.max(*b);
        }
    }
    let normalized: Vec<(f64, f64)> = with_bitrate
        .iter()
        .filter_map(|(v, b, m)| {
            let top = max_per_source.get(sources.get(*v)?.as_str())?;
            (*top > 0.0).then(|| (b / top, *m))
        })
        .collect();
    let nx: Vec<f64> = normalized.iter().map(|x| x.0).collect();
    let ny: Vec<f64> = normalized.iter().map(|x| x.1).collect();
    let norm = math::pearson(&nx, &ny);
    let sx: Vec<f64> = paired.iter().map(|p| p.1).collect();
    let sy: Vec<f64> = paired.iter().map(|p| p.3).collect();
    let logistic = fit_logistic(&sx, &sy);

    let show = |r: &satqoe_core::Result<f64>| match r {
        Ok(v) => json!(v),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let analysis = json!({
        "provenance": prov,
        "videos_with_mos": paired.len(),
        "bitrate_mean_vs_mos_plcc": show(&raw),
        "source_normalized_bitrate_vs_mos_plcc": show(&norm),
        "stall_ratio_vs_mos_logistic": match &logistic {
            Ok(f) => json!(f),
            Err(e) => json!({ "error": e.to_string() }),
        },
    });
    let mut text = serde_json::to_string_pretty(&analysis).expect("analysis serializes");
    text.push('\n');
    io_util::write_text(&cfg.out(ANALYSIS_FILE), &text)
}
