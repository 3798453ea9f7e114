//! Results bundle written by `irsma run` and read back by `report`/`cdf`.
//!
//! ```text
//! <out>/config.txt        effective configuration (re-runnable)
//! <out>/drops.csv         drop,scheme,sum_rate_bpshz
//! <out>/summary.json      per-scheme percentiles plus config echo
//! <out>/cdf_<scheme>.csv  rate_bpshz,cum_prob
//! ```
//!
//! Numbers are written with Rust's shortest round-trip formatting, so they
//! carry full double precision independent of locale.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{config_entries, render_config};
use crate::montecarlo::CampaignResult;
use crate::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.json";
pub const DROPS_FILE: &str = "drops.csv";
pub const CONFIG_FILE: &str = "config.txt";

pub fn cdf_file_name(scheme: &str) -> String {
    format!("cdf_{scheme}.csv")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeStats {
    pub scheme: String,
    pub likely95: f64,
    pub likely50: f64,
    pub mean: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub drops: usize,
    pub resampled_drops: usize,
    pub schemes: Vec<SchemeStats>,
    pub config: BTreeMap<String, String>,
}

impl Summary {
    pub fn from_campaign(result: &CampaignResult) -> Self {
        Self {
            drops: result.config.drops,
            resampled_drops: result.resampled_drops,
            schemes: result
                .schemes
                .iter()
                .map(|s| SchemeStats {
                    scheme: s.scheme.name().to_string(),
                    likely95: s.likely95,
                    likely50: s.likely50,
                    mean: s.mean,
                    samples: s.samples.len(),
                })
                .collect(),
            config: config_entries(&result.config)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn scheme(&self, name: &str) -> Option<&SchemeStats> {
        self.schemes.iter().find(|s| s.scheme == name)
    }
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

fn read(path: PathBuf) -> Result<String> {
    fs::read_to_string(&path).map_err(|e| Error::io(path, e))
}

pub fn drops_csv(result: &CampaignResult) -> String {
    let mut out = String::from("drop,scheme,sum_rate_bpshz\n");
    for d in &result.drops {
        for (scheme, r) in &d.results {
            let _ = writeln!(out, "{},{},{}", d.drop_index, scheme.name(), r.sum_rate);
        }
    }
    out
}

pub fn cdf_csv(result: &CampaignResult, scheme_index: usize) -> String {
    let mut out = String::from("rate_bpshz,cum_prob\n");
    for p in result.schemes[scheme_index].cdf() {
        let _ = writeln!(out, "{},{}", p.rate, p.cumulative_probability);
    }
    out
}

/// Write the whole bundle into `dir`, creating it if needed.
pub fn write_bundle(result: &CampaignResult, dir: &Path) -> Result<Summary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir.join(CONFIG_FILE), &render_config(&result.config))?;
    write(dir.join(DROPS_FILE), &drops_csv(result))?;
    for (i, s) in result.schemes.iter().enumerate() {
        write(dir.join(cdf_file_name(s.scheme.name())), &cdf_csv(result, i))?;
    }
    let summary = Summary::from_campaign(result);
    write(dir.join(SUMMARY_FILE), &summary.to_json())?;
    Ok(summary)
}

pub fn read_summary(dir: &Path) -> Result<Summary> {
    let path = dir.join(SUMMARY_FILE);
    let text = read(path.clone())?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path,
        message: format!("not a valid summary: {e}"),
    })
}

/// Aligned table of the percentile rates, highest median first.
pub fn report_table(summary: &Summary) -> String {
    let mut rows: Vec<&SchemeStats> = summary.schemes.iter().collect();
    rows.sort_by(|a, b| b.likely50.total_cmp(&a.likely50));
    let mut out = format!(
        "{:<12} {:>12} {:>12} {:>10} {:>8}\n",
        "scheme", "95%-likely", "50%-likely", "mean", "drops"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<12} {:>12.3} {:>12.3} {:>10.3} {:>8}",
            r.scheme, r.likely95, r.likely50, r.mean, r.samples
        );
    }
    out
}

/// Stored CDF of `scheme` as CSV text, checked for well-formedness.
pub fn read_cdf(dir: &Path, scheme: &str) -> Result<String> {
    let summary = read_summary(dir)?;
    if summary.scheme(scheme).is_none() {
        let names: Vec<_> = summary.schemes.iter().map(|s| s.scheme.as_str()).collect();
        return Err(Error::domain(format!(
            "scheme `{scheme}` not in results (available: {})",
            names.join(", ")
        )));
    }
    let path = dir.join(cdf_file_name(scheme));
    let text = read(path.clone())?;
    let bad = |message: String| Error::Format { path: path.clone(), message };
    let mut lines = text.lines();
    if lines.next() != Some("rate_bpshz,cum_prob") {
        return Err(bad("missing `rate_bpshz,cum_prob` header".into()));
    }
    for (i, l) in lines.enumerate() {
        let ok = l
            .split_once(',')
            .is_some_and(|(a, b)| a.parse::<f64>().is_ok() && b.parse::<f64>().is_ok());
        if !ok {
            return Err(bad(format!("malformed row {}: `{l}`", i + 2)));
        }
    }
    Ok(text)
}
