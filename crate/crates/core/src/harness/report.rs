//! CSV tables, two-column plot files and the JSON summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::experiment::{OracleCheck, RateRow, RiskReport, SCHEMA_VERSION};
use crate::error::Result;

fn csv_file(dir: &Path, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(path)
}

fn json_file<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the risk surface, adaptive summary, m̂ histogram, slopes, plot data
/// and `summary.json` into `dir`; returns the written paths.
pub fn write_run(report: &RiskReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    out.push(csv_file(
        dir,
        "risk_surface.csv",
        &["n", "t", "m", "variant", "mean", "bias2", "variance", "mse", "mse_stderr", "count"],
        report.sizes.iter().flat_map(|s| {
            s.cells.iter().zip(&s.mse_stderr).map(move |(c, se)| {
                vec![
                    s.n.to_string(),
                    s.t.to_string(),
                    c.m.to_string(),
                    c.variant.label().to_string(),
                    c.mean.to_string(),
                    c.bias2.to_string(),
                    c.variance.to_string(),
                    c.mse.to_string(),
                    se.to_string(),
                    c.count.to_string(),
                ]
            })
        }),
    )?);
    out.push(csv_file(
        dir,
        "adaptive.csv",
        &[
            "n",
            "t",
            "replications_used",
            "failures",
            "oracle_bandwidth_m",
            "oracle_bandwidth_mse",
            "m_star",
            "oracle_bound",
            "oracle_mse",
            "adaptive_mse",
            "adaptive_mse_stderr",
            "oracle_ratio",
        ],
        report.sizes.iter().map(|s| {
            let a = s.adaptive.as_ref();
            vec![
                s.n.to_string(),
                s.t.to_string(),
                s.replications_used.to_string(),
                s.failures.to_string(),
                s.oracle_bandwidth_m.to_string(),
                s.oracle_bandwidth_mse.to_string(),
                s.m_star.to_string(),
                s.oracle_bound.to_string(),
                s.oracle_mse.to_string(),
                opt(a.map(|a| a.mse)),
                opt(a.map(|a| a.mse_stderr)),
                opt(a.map(|a| a.oracle_ratio)),
            ]
        }),
    )?);
    out.push(csv_file(
        dir,
        "m_hat_histogram.csv",
        &["n", "m", "count"],
        report.sizes.iter().flat_map(|s| {
            s.adaptive
                .iter()
                .flat_map(move |a| a.m_hat_histogram.iter().map(move |(m, c)| vec![s.n.to_string(), m.to_string(), c.to_string()]))
        }),
    )?);
    out.push(csv_file(
        dir,
        "slopes.csv",
        &["quantity", "slope", "stderr", "theoretical"],
        report.slopes.iter().map(|f| vec![f.quantity.clone(), f.slope.to_string(), f.stderr.to_string(), opt(f.theoretical)]),
    )?);
    out.push(csv_file(
        dir,
        "plot_oracle_bandwidth_mse.csv",
        &["t", "mse"],
        report.sizes.iter().map(|s| vec![s.t.to_string(), s.oracle_bandwidth_mse.to_string()]),
    )?);
    if report.config.adaptive {
        out.push(csv_file(
            dir,
            "plot_adaptive_mse.csv",
            &["t", "mse"],
            report.sizes.iter().map(|s| vec![s.t.to_string(), opt(s.adaptive.as_ref().map(|a| a.mse))]),
        )?);
    }
    out.push(csv_file(
        dir,
        "plot_smoothed_target.csv",
        &["m", "theta_m"],
        report.config.m_grid.iter().zip(&report.targets).map(|(m, t)| vec![m.to_string(), t.to_string()]),
    )?);
    out.push(json_file(dir, "summary.json", report)?);
    Ok(out)
}

#[derive(Serialize)]
struct RatesSummary<'a> {
    schema_version: u32,
    rows: &'a [RateRow],
}

pub fn write_rates(rows: &[RateRow], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv = csv_file(
        dir,
        "rates.csv",
        &["n", "t", "form", "exponent", "local_slope", "value"],
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.t.to_string(),
                format!("{:?}", r.form),
                r.exponent.to_string(),
                r.local_slope.to_string(),
                r.value.to_string(),
            ]
        }),
    )?;
    let json = json_file(dir, "rates.json", &RatesSummary { schema_version: SCHEMA_VERSION, rows })?;
    Ok(vec![csv, json])
}

pub fn write_oracle_check(check: &OracleCheck, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv = csv_file(
        dir,
        "oracle_check.csv",
        &["n", "m", "theta_m", "pen", "criterion", "bias2", "var_bound", "is_m_star"],
        check.sizes.iter().flat_map(|s| {
            check.m_grid.iter().enumerate().map(move |(i, m)| {
                vec![
                    s.n.to_string(),
                    m.to_string(),
                    check.targets[i].to_string(),
                    s.pens[i].to_string(),
                    s.criterion[i].to_string(),
                    s.bias2[i].to_string(),
                    s.var_bound[i].to_string(),
                    (s.m_star == *m).to_string(),
                ]
            })
        }),
    )?;
    let json = json_file(dir, "oracle_check.json", check)?;
    Ok(vec![csv, json])
}
