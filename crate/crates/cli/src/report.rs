use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// One summary number, optionally checked against a bound.
#[derive(Debug, Clone, Serialize)]
pub struct Line {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl Line {
    pub fn value(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, bound: None, pass: None }
    }

    pub fn check(name: impl Into<String>, value: f64, bound: Option<f64>, pass: bool) -> Self {
        Self { name: name.into(), value, bound, pass: Some(pass) }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub pass: bool,
    pub summary: Vec<Line>,
    pub data: serde_json::Value,
    pub config: RunConfig,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl Report {
    pub fn new(command: &str, cfg: &RunConfig, summary: Vec<Line>, data: serde_json::Value) -> Self {
        let pass = summary.iter().all(|l| l.pass != Some(false));
        Self { command: command.into(), seed: cfg.seed, pass, summary, data, config: cfg.clone(), csv: None }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    /// Summary text; numbers are rendered exactly as in the JSON report.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.summary {
            let tag = match l.pass {
                Some(true) => "PASS ",
                Some(false) => "FAIL ",
                None => "",
            };
            let _ = write!(out, "{tag}{} = {}", l.name, num(l.value));
            if let Some(b) = l.bound {
                let _ = write!(out, " (bound {})", num(b));
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(format!("{}.json", self.command)), json + "\n")?;
        if let Some(csv) = &self.csv {
            std::fs::write(dir.join(format!("{}.csv", self.command)), csv)?;
        }
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| "null".into())
}

/// CSV with a header row; every cell is a number rendered as in JSON.
pub fn csv(header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|&x| num(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
