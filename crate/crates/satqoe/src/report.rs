//! Benchmark report as JSON plus a flat per-trial CSV.

use std::fmt::Write as _;

use satqoe_core::eval::EvalReport;
use serde::{Deserialize, Serialize};

use crate::provenance::Provenance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub provenance: Provenance,
    #[serde(flatten)]
    pub report: EvalReport,
}

pub fn render_report(report: &EvalReport, prov: &Provenance) -> String {
    let file = ReportFile { provenance: prov.clone(), report: report.clone() };
    let mut s = serde_json::to_string_pretty(&file).expect("report serializes");
    s.push('\n');
    s
}

pub const TRIALS_HEADER: &str = "feature_set,model,trial,seed,n_train,n_test,srocc,plcc,rmse,cv_rmse,chosen,error";

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn render_trials(report: &EvalReport, prov: &Provenance) -> String {
    let mut out = prov.csv_comment();
    out.push_str(TRIALS_HEADER);
    out.push('\n');
    for cell in &report.cells {
        for t in &cell.trials {
            let m = |f: fn(&satqoe_core::eval::Metrics) -> f64| t.metrics.as_ref().map_or_else(String::new, |x| f(x).to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                cell.feature_set,
                cell.model,
                t.trial,
                t.seed,
                t.n_train,
                t.n_test,
                m(|x| x.srocc),
                m(|x| x.plcc),
                m(|x| x.rmse),
                t.cv_rmse.map_or_else(String::new, |v| v.to_string()),
                t.chosen.as_ref().map_or_else(String::new, |s| quoted(&s.describe())),
                t.error.as_deref().map_or_else(String::new, quoted),
            );
        }
    }
    out
}

/// Human-oriented summary table of the cell medians.
pub fn summary_table(report: &EvalReport) -> String {
    let mut out = String::from("feature_set  model  ok/n     SROCC    PLCC     RMSE\n");
    for c in &report.cells {
        let n = c.successes + c.failures;
        match c.median {
            Some(m) => {
                let _ = writeln!(
                    out,
                    "{:<12} {:<6} {:>3}/{:<4} {:>7.4}  {:>7.4}  {:>8.4}",
                    c.feature_set.as_str(),
                    c.model.as_str(),
                    c.successes,
                    n,
                    m.srocc,
                    m.plcc,
                    m.rmse
                );
            }
            None => {
                let _ = writeln!(out, "{:<12} {:<6} {:>3}/{:<4} (no successful trials)", c.feature_set.as_str(), c.model.as_str(), 0, n);
            }
        }
    }
    out
}
