//! CSV row types and the plain-text renderers.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub quantity: String,
    pub unit: String,
    pub value: f64,
    pub abs_error: f64,
    pub x_lower: Option<f64>,
    pub x_upper: Option<f64>,
    pub evaluations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub mode: String,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub rel_gap: f64,
    pub no_coverage_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub lambda: f64,
    pub rate_bit_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub w_ratio: f64,
    pub p_ratio: f64,
    pub r_nsh_mbit_s: Option<f64>,
    pub r_sh_mbit_s: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(format!("csv: {e}")))
}

pub fn from_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, CliError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Io(format!("csv: {e}")))
}

fn cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.1}"),
        None => "failed".to_string(),
    }
}

/// Two blocks (non-sharing, then sharing) with power ratios as rows and
/// bandwidth ratios as columns, in Mbit/s to one decimal.
pub fn render_table(rows: &[TableRow], w_ratios: &[f64], p_ratios: &[f64]) -> String {
    let lookup = |w: f64, p: f64| rows.iter().find(|r| r.w_ratio == w && r.p_ratio == p);
    let mut out = String::from("Aggregate average rate (Mbit/s)\n");
    let blocks: [(&str, fn(&TableRow) -> Option<f64>); 2] = [
        ("Non-sharing", |r| r.r_nsh_mbit_s),
        ("Sharing", |r| r.r_sh_mbit_s),
    ];
    for (title, pick) in blocks {
        let _ = write!(out, "\n{title:<14}");
        for w in w_ratios {
            let _ = write!(out, "{:>14}", format!("W2/W1={w}"));
        }
        out.push('\n');
        for &p in p_ratios {
            let _ = write!(out, "{:<14}", format!("P2/P1={p}"));
            for &w in w_ratios {
                let _ = write!(out, "{:>14}", cell(lookup(w, p).and_then(pick)));
            }
            out.push('\n');
        }
    }
    out
}
