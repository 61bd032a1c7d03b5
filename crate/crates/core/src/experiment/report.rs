use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::SweepReport;

pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// Formats `x` with six significant digits, like C's `%.6g`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn runs_csv(report: &SweepReport) -> String {
    let mut out =
        String::from("sweep_var,sweep_value,scheme,seed,completed_flows,system_throughput_mbps,total_slots_used\n");
    for r in &report.runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            report.variable,
            format_number(r.sweep_value),
            r.scheme,
            r.seed,
            r.metrics.completed_flows,
            format_number(r.metrics.system_throughput_bps / 1e6),
            r.metrics.total_slots_used
        );
    }
    out
}

pub fn summary_csv(report: &SweepReport) -> String {
    let mut out = String::from(
        "sweep_var,sweep_value,scheme,runs,completed_flows_mean,completed_flows_std,\
         system_throughput_mbps_mean,system_throughput_mbps_std,total_slots_used_mean,total_slots_used_std\n",
    );
    for r in &report.summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            report.variable,
            format_number(r.sweep_value),
            r.scheme,
            r.runs,
            format_number(r.completed_flows.mean),
            format_number(r.completed_flows.std),
            format_number(r.system_throughput_mbps.mean),
            format_number(r.system_throughput_mbps.std),
            format_number(r.total_slots_used.mean),
            format_number(r.total_slots_used.std),
        );
    }
    out
}

/// Writes `runs.csv` and `summary.csv` into `dir`, creating it if needed.
/// Returns both paths.
pub fn write_report(report: &SweepReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let runs = dir.join(RUNS_FILE);
    let summary = dir.join(SUMMARY_FILE);
    std::fs::write(&runs, runs_csv(report)).map_err(io(&runs))?;
    std::fs::write(&summary, summary_csv(report)).map_err(io(&summary))?;
    Ok((runs, summary))
}
