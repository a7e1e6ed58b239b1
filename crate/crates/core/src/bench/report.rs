use std::fmt::Write as _;

use super::{BenchMethod, ComparisonReport, ReportRow, RunMetrics};
use crate::io::csv_string;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

const CSV_HEADER: [&str; 8] = [
    "scenario",
    "method",
    "seed",
    "optimal_drones",
    "min_total_cost",
    "wall_time_seconds",
    "converged",
    "host",
];

pub fn emit_report(report: &ComparisonReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Text => Ok(text_table(report)),
        ReportFormat::Csv => report_csv(report),
    }
}

/// Failed rows keep their method and seed, leave the numeric fields empty
/// and report `converged = false`.
fn report_csv(report: &ComparisonReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in &report.rows {
        let (drones, cost, wall, conv) = match row.metrics() {
            Some(m) => (
                m.optimal_drones.to_string(),
                m.min_total_cost.to_string(),
                m.wall_time_seconds.to_string(),
                m.converged,
            ),
            None => (String::new(), String::new(), String::new(), false),
        };
        w.write_record([
            report.scenario.clone(),
            row.method().to_string(),
            row.seed().to_string(),
            drones,
            cost,
            wall,
            conv.to_string(),
            report.host.clone(),
        ])?;
    }
    csv_string(w)
}

/// Reads a report written by [`emit_report`] in CSV form.
pub fn parse_report_csv(text: &str) -> Result<ComparisonReport> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Report(format!("unexpected header {header:?}")));
    }
    let mut scenario = None;
    let mut host = None;
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let bad = |what: &str| Error::Report(format!("line {line}: bad {what}"));
        scenario.get_or_insert_with(|| rec[0].to_string());
        host.get_or_insert_with(|| rec[7].to_string());
        let method: BenchMethod = rec[1].parse().map_err(|_| bad("method"))?;
        let seed: u64 = rec[2].parse().map_err(|_| bad("seed"))?;
        if rec[3].is_empty() {
            rows.push(ReportRow::Failed {
                method,
                seed,
                error: "run failed".into(),
            });
            continue;
        }
        rows.push(ReportRow::Completed(RunMetrics {
            method,
            seed,
            optimal_drones: rec[3].parse().map_err(|_| bad("optimal_drones"))?,
            min_total_cost: rec[4].parse().map_err(|_| bad("min_total_cost"))?,
            wall_time_seconds: rec[5].parse().map_err(|_| bad("wall_time_seconds"))?,
            converged: rec[6].parse().map_err(|_| bad("converged"))?,
        }));
    }
    match (scenario, host) {
        (Some(scenario), Some(host)) => Ok(ComparisonReport { scenario, host, rows }),
        _ => Err(Error::Report("report has no rows".into())),
    }
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
}

/// Metrics as rows, one column per method. Values are medians over
/// completed runs.
fn text_table(report: &ComparisonReport) -> String {
    let agg = report.aggregate();
    let mut lines: Vec<(String, Vec<String>)> = vec![(
        "Metric".into(),
        agg.iter().map(|a| a.method.label().to_string()).collect(),
    )];
    lines.push((
        "Optimal number of drones".into(),
        agg.iter()
            .map(|a| match a.optimal_drones {
                Some(d) if d.fract() == 0.0 => format!("{d:.0}"),
                other => fmt_opt(other, 1),
            })
            .collect(),
    ));
    lines.push((
        "Minimum total cost (artifact scale)".into(),
        agg.iter().map(|a| fmt_opt(a.min_total_cost, 2)).collect(),
    ));
    lines.push((
        "Time to convergence (s)".into(),
        agg.iter().map(|a| fmt_opt(a.wall_time_seconds, 3)).collect(),
    ));
    lines.push((
        "Converged runs".into(),
        agg.iter().map(|a| format!("{}/{}", a.converged, a.runs)).collect(),
    ));

    let first = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..agg.len())
        .map(|c| lines.iter().map(|(_, v)| v[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "Scenario: {}", report.scenario);
    let _ = writeln!(out, "Host: {}", report.host);
    for (label, vals) in &lines {
        let mut line = format!("{label:<first$}");
        for (v, w) in vals.iter().zip(&widths) {
            let _ = write!(line, "  {v:>w$}");
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    for row in &report.rows {
        if let ReportRow::Failed { method, seed, error } = row {
            let _ = writeln!(out, "failed: {method} seed {seed}: {error}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComparisonReport {
        let m = |method, seed, cost: f64| {
            ReportRow::Completed(RunMetrics {
                method,
                seed,
                optimal_drones: 1,
                min_total_cost: cost,
                wall_time_seconds: 0.1 + seed as f64,
                converged: true,
            })
        };
        ComparisonReport {
            scenario: "env1".into(),
            host: "test host, with comma".into(),
            rows: vec![
                m(BenchMethod::Mpc, 0, 1.0 / 3.0),
                m(BenchMethod::Iql, 0, 2.0e-17),
                ReportRow::Failed {
                    method: BenchMethod::Jal,
                    seed: 0,
                    error: "run failed".into(),
                },
                m(BenchMethod::Vdn, 0, 123456.789),
            ],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let r = sample();
        let text = emit_report(&r, ReportFormat::Csv).unwrap();
        assert_eq!(parse_report_csv(&text).unwrap(), r);
    }

    #[test]
    fn text_columns_in_method_order() {
        let text = emit_report(&sample(), ReportFormat::Text).unwrap();
        let header = text.lines().find(|l| l.starts_with("Metric")).unwrap();
        let cols: Vec<&str> = header.split_whitespace().skip(1).collect();
        assert_eq!(cols, ["MPC", "IQL", "JAL", "VDN"]);
        assert!(text.contains("failed: jal seed 0"));
        assert!(text
            .lines()
            .any(|l| l.starts_with("Converged runs") && l.contains("0/1")));
    }

    #[test]
    fn single_row_single_column() {
        let mut r = sample();
        r.rows.truncate(1);
        let text = emit_report(&r, ReportFormat::Text).unwrap();
        let header = text.lines().find(|l| l.starts_with("Metric")).unwrap();
        assert_eq!(header.split_whitespace().count(), 2);
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(parse_report_csv("a,b\n1,2\n").is_err());
        assert!(parse_report_csv(&CSV_HEADER.join(",")).is_err());
    }
}
