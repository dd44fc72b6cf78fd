//! CSV + sidecar summary writing with a reproducibility digest.
//!
//! The wall-time column is the one nondeterministic field, so the digest
//! (and any byte-identity comparison) is taken over the CSV with the
//! `seconds` column projected out.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{CliError, ExitCode};

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// sha256 over the CSV with every `seconds` column removed.
    pub fn digest(&self) -> String {
        let drop: Vec<usize> = self
            .header
            .iter()
            .enumerate()
            .filter_map(|(i, h)| (*h == "seconds").then_some(i))
            .collect();
        let mut hasher = Sha256::new();
        let keep = |row: &[String]| -> String {
            row.iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, v)| v.clone())
                .collect::<Vec<_>>()
                .join(",")
        };
        let header: Vec<String> = self.header.iter().map(|s| s.to_string()).collect();
        hasher.update(keep(&header));
        hasher.update(b"\n");
        for row in &self.rows {
            hasher.update(keep(row));
            hasher.update(b"\n");
        }
        format!("{:x}", hasher.finalize())
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_outputs(
    out: &Path,
    table: &Table,
    summary_lines: &[(String, String)],
) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| {
        CliError::new(ExitCode::Config, format!("cannot write output: {e}"))
    };
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    std::fs::write(out, table.csv()).map_err(io_err)?;
    let mut summary = String::new();
    for (k, v) in summary_lines {
        summary.push_str(&format!("{k} = {v}\n"));
    }
    let summary_path = summary_sidecar_path(out);
    let mut f = std::fs::File::create(&summary_path).map_err(io_err)?;
    f.write_all(summary.as_bytes()).map_err(io_err)?;
    Ok(())
}

pub fn summary_sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.txt");
    std::path::PathBuf::from(s)
}
