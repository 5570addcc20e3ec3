//! Result files and their projections: JSON, histogram CSV and SVG charts.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{BlockTailReport, ExperimentConfig, PadReport, Summary, TrialResult};

pub const SCHEMA_VERSION: &str = "pdx-result/1";

/// Serialized field order is the declaration order below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema_version: String,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticReports>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReports {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_tail: Option<BlockTailReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad_check: Option<PadReport>,
}

impl ResultFile {
    pub fn new(config: ExperimentConfig, trials: Vec<TrialResult>) -> Self {
        let summary = Summary::from_trials(config.rho, &trials);
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            config,
            trials,
            summary,
            diagnostics: None,
        }
    }

    /// Whether the stored summary matches one recomputed from the trials.
    pub fn is_consistent(&self) -> bool {
        self.summary == Summary::from_trials(self.config.rho, &self.trials)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn to_json(file: &ResultFile) -> Result<String> {
    let mut s = serde_json::to_string_pretty(file)?;
    s.push('\n');
    Ok(s)
}

#[derive(Deserialize)]
struct Header {
    schema_version: String,
}

pub fn from_json(text: &str) -> Result<ResultFile> {
    let header: Header = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema {
            found: header.schema_version,
            expected: SCHEMA_VERSION.to_string(),
        });
    }
    serde_json::from_str(text).map_err(|e| parse_error(text, &e))
}

fn parse_error(text: &str, e: &serde_json::Error) -> Error {
    Error::Parse {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    }
}

/// Converts a 1-based line and column into a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn write_json(path: &Path, file: &ResultFile) -> Result<()> {
    std::fs::write(path, to_json(file)?)?;
    Ok(())
}

pub fn write_result(path: &Path, file: &ResultFile, format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(path, file),
        Format::Csv => Ok(std::fs::write(path, histogram_csv(&file.summary))?),
    }
}

pub fn read_result(path: &Path) -> Result<ResultFile> {
    from_json(&std::fs::read_to_string(path)?)
}

/// `degree,count,probability`, one row per degree from the smallest to the
/// largest observed, zeros included.
pub fn histogram_csv(summary: &Summary) -> String {
    let mut out = String::from("degree,count,probability\n");
    if let (Some(&lo), Some(&hi)) = (
        summary.histogram.keys().next(),
        summary.histogram.keys().next_back(),
    ) {
        for k in lo..=hi {
            let c = summary.histogram.get(&k).copied().unwrap_or(0);
            let _ = writeln!(out, "{k},{c},{}", c as f64 / summary.trials as f64);
        }
    }
    out
}

/// Bar chart of the maximal-degree histogram.
pub fn histogram_svg(summary: &Summary) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 20.0;
    const BOTTOM: f64 = 60.0;
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    let degrees: Vec<u32> = match (
        summary.histogram.keys().next(),
        summary.histogram.keys().next_back(),
    ) {
        (Some(&lo), Some(&hi)) => (lo..=hi).collect(),
        _ => Vec::new(),
    };
    let ymax = summary.p_hat.values().copied().fold(0.0, f64::max);
    let slot = pw / degrees.len().max(1) as f64;
    for (i, &k) in degrees.iter().enumerate() {
        let p = summary.p(k);
        let h = if ymax > 0.0 { ph * p / ymax } else { 0.0 };
        let x = LEFT + i as f64 * slot;
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4a72b0"/>"##,
            x + 0.1 * slot,
            TOP + ph - h,
            0.8 * slot,
            h
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
            x + slot / 2.0,
            TOP + ph + 18.0
        );
    }
    // axes and y ticks
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT} {TOP} V{} H{}" stroke="black" fill="none"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for t in 0..=4 {
        let v = ymax * t as f64 / 4.0;
        let y = TOP + ph - ph * t as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Maximal Degree</text>"#,
        LEFT + pw / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">Empirical Probability</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    s.push_str("</svg>\n");
    s
}
