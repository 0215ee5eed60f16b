//! Matplotlib script emission.
//!
//! The script locates its data relative to its own directory, so an output
//! directory can be moved or archived as a whole and still be plotted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{read_file, write_file, BenchError, Result};
use crate::experiment::{DenoiseReport, SignalFiles};

/// What the script needs from one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotEntry {
    pub label: String,
    pub experiment: Option<String>,
    pub dir: PathBuf,
    pub files: SignalFiles,
}

impl From<&DenoiseReport> for PlotEntry {
    fn from(r: &DenoiseReport) -> Self {
        Self {
            label: r.label.clone(),
            experiment: r.experiment.clone(),
            dir: r.out_dir.clone(),
            files: r.files.clone(),
        }
    }
}

impl PlotEntry {
    /// Read back the fields a plot needs from a `*_report.json` file.
    pub fn from_report_json(path: &Path) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(&read_file(path)?)?;
        let text = |k: &str| -> Result<String> {
            v.get(k)
                .and_then(|x| x.as_str())
                .map(str::to_string)
                .ok_or_else(|| BenchError::Usage(format!("{}: missing `{k}`", path.display())))
        };
        let files = v.get("files").cloned().unwrap_or_default();
        let file = |k: &str| -> Result<String> {
            files
                .get(k)
                .and_then(|x| x.as_str())
                .map(str::to_string)
                .ok_or_else(|| BenchError::Usage(format!("{}: missing files.{k}", path.display())))
        };
        Ok(Self {
            label: text("label")?,
            experiment: v
                .get("experiment")
                .and_then(|x| x.as_str())
                .map(str::to_string),
            dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
            files: SignalFiles {
                clean: file("clean")?,
                noisy: file("noisy")?,
                denoised: file("denoised")?,
                error: file("error")?,
                log: file("log")?,
            },
        })
    }
}

/// Every `*_report.json` in `dir`, sorted by file name.
pub fn entries_in_dir(dir: &Path) -> Result<Vec<PlotEntry>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| BenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with("_report.json"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| PlotEntry::from_report_json(p))
        .collect()
}

const HEADER: &str = r#"#!/usr/bin/env python3
"""Overlay clean, noisy and denoised signals with their error curves.

Data paths are relative to this file. Figures are written next to it.
"""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["position"]) for r in rows], [float(r["value"]) for r in rows]
"#;

const BODY: &str = r#"

def main():
    for name, clean, noisy, runs in FIGURES:
        fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(12, 7))
        p, v = load(noisy)
        top.plot(p, v, color="0.75", lw=0.5, label="noisy")
        p, v = load(clean)
        top.plot(p, v, color="black", lw=1.0, label="clean")
        for label, denoised, error in runs:
            p, v = load(denoised)
            top.plot(p, v, lw=0.8, label=label)
            p, v = load(error)
            bottom.plot(p, v, lw=0.6, label=label)
        top.set_title(name)
        top.legend(loc="upper right", fontsize="small")
        bottom.set_ylabel("denoised - clean")
        bottom.set_xlabel("position")
        bottom.legend(loc="upper right", fontsize="small")
        fig.tight_layout()
        fig.savefig(os.path.join(HERE, name + ".png"), dpi=120)
        plt.close(fig)


if __name__ == "__main__":
    main()
"#;

fn py_str(s: &str) -> String {
    // JSON string literals are valid Python literals.
    serde_json::to_string(s).expect("string serializes")
}

/// Path of `file` in `dir` relative to `base`, which must contain `dir`.
fn relative(base: &Path, dir: &Path, file: &str) -> Result<String> {
    let base_c = base.canonicalize().map_err(|e| BenchError::io(base, e))?;
    let dir_c = dir.canonicalize().map_err(|e| BenchError::io(dir, e))?;
    let rel = dir_c.strip_prefix(&base_c).map_err(|_| {
        BenchError::Usage(format!(
            "{} is outside the plot directory {}",
            dir.display(),
            base.display()
        ))
    })?;
    let path = rel.join(file);
    let parts: Vec<String> = path
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    Ok(parts.join("/"))
}

/// Write a script drawing one figure per experiment tag (untagged runs get
/// a figure each). With no reports the script has the header only.
pub fn emit_plot_script(reports: &[DenoiseReport], path: &Path) -> Result<()> {
    let entries: Vec<PlotEntry> = reports.iter().map(PlotEntry::from).collect();
    emit_plot_script_for(&entries, path)
}

pub fn emit_plot_script_for(entries: &[PlotEntry], path: &Path) -> Result<()> {
    let mut script = String::from(HEADER);
    if !entries.is_empty() {
        let base = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut groups: BTreeMap<String, Vec<&PlotEntry>> = BTreeMap::new();
        for e in entries {
            groups
                .entry(e.experiment.clone().unwrap_or_else(|| e.label.clone()))
                .or_default()
                .push(e);
        }
        script.push_str("\nFIGURES = [\n");
        for (name, members) in &groups {
            let first = members[0];
            let _ = writeln!(
                script,
                "    (\n        {},\n        {},\n        {},\n        [",
                py_str(name),
                py_str(&relative(&base, &first.dir, &first.files.clean)?),
                py_str(&relative(&base, &first.dir, &first.files.noisy)?)
            );
            for e in members {
                let _ = writeln!(
                    script,
                    "            ({}, {}, {}),",
                    py_str(&e.label),
                    py_str(&relative(&base, &e.dir, &e.files.denoised)?),
                    py_str(&relative(&base, &e.dir, &e.files.error)?)
                );
            }
            script.push_str("        ],\n    ),\n");
        }
        script.push_str("]\n");
        script.push_str(BODY);
    }
    write_file(path, &script)
}
