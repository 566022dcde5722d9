//! JSON and CSV serialization of bound reports.

use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{BoundReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("csv output is not utf-8")]
    Utf8,
}

/// One CSV row; column order is the header order.
#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    group: &'a str,
    n: u32,
    order: u64,
    power_order: u64,
    derived_length: Option<u32>,
    alpha: u32,
    beta: u32,
    d_positive: u32,
    d_symmetric: u32,
    exhaustive: bool,
    gensets_visited: u64,
    seed: Option<u64>,
    bound_sym: Option<String>,
    bound_diam: Option<String>,
    bound_pgroup: Option<String>,
    bound_q8: Option<String>,
    bound_abelian: Option<String>,
    babai_violations: u64,
    verdict_sym: Option<&'static str>,
    verdict_diam: Option<&'static str>,
    verdict_pgroup: Option<&'static str>,
    verdict_q8: Option<&'static str>,
    verdict_abelian: Option<&'static str>,
    verdict_babai: Option<&'static str>,
}

fn verdict(v: Option<Verdict>) -> Option<&'static str> {
    v.map(Verdict::as_str)
}

impl<'a> From<&'a BoundReport> for CsvRow<'a> {
    fn from(r: &'a BoundReport) -> Self {
        let s = |v: Option<u128>| v.map(|v| v.to_string());
        CsvRow {
            group: &r.group,
            n: r.n,
            order: r.order,
            power_order: r.power_order,
            derived_length: r.derived_length,
            alpha: r.alpha,
            beta: r.beta,
            d_positive: r.d_positive,
            d_symmetric: r.d_symmetric,
            exhaustive: r.exhaustive,
            gensets_visited: r.gensets_visited,
            seed: r.seed,
            bound_sym: s(r.bound_sym),
            bound_diam: s(r.bound_diam),
            bound_pgroup: r.bound_pgroup.map(|v| format!("{v:.6}")),
            bound_q8: s(r.bound_q8),
            bound_abelian: s(r.bound_abelian),
            babai_violations: r.babai_violations,
            verdict_sym: verdict(r.verdicts.bound_sym),
            verdict_diam: verdict(r.verdicts.bound_diam),
            verdict_pgroup: verdict(r.verdicts.bound_pgroup),
            verdict_q8: verdict(r.verdicts.bound_q8),
            verdict_abelian: verdict(r.verdicts.bound_abelian),
            verdict_babai: verdict(r.verdicts.babai),
        }
    }
}

/// Pretty JSON for a single report (an array when several are given), or
/// CSV with a header and one row per report.
pub fn emit_reports(reports: &[BoundReport], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Json => {
            let mut s = if let [one] = reports {
                serde_json::to_string_pretty(one)?
            } else {
                serde_json::to_string_pretty(reports)?
            };
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(CsvRow::from(r))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| ReportError::Csv(e.into_error().into()))?;
            String::from_utf8(bytes).map_err(|_| ReportError::Utf8)
        }
    }
}

pub fn emit_report(report: &BoundReport, format: Format) -> Result<String, ReportError> {
    emit_reports(std::slice::from_ref(report), format)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{verify_report, VerifyOptions};
    use crate::catalog::resolve_group;

    #[test]
    fn json_and_csv_are_deterministic() {
        let g = resolve_group("S3").unwrap();
        let r = verify_report(&g, 1, &VerifyOptions::default()).unwrap();
        let a = emit_report(&r, Format::Json).unwrap();
        let b = emit_report(
            &verify_report(&g, 1, &VerifyOptions::default()).unwrap(),
            Format::Json,
        )
        .unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema"], "diamlab/1");
        assert_eq!(v["valid_from_n"], 2);
        let csv = emit_report(&r, Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert!(lines
            .next()
            .unwrap()
            .starts_with("group,n,order,power_order"));
        assert!(lines.next().unwrap().starts_with("S3,1,6,6,2,"));
        assert_eq!(lines.next(), None);
    }
}
