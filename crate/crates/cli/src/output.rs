//! Report headers, JSON-lines files and PBM snapshots.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use difflife::{Grid, RuleSpec};
use serde::Serialize;

/// Leads every report. Re-running a command with the same header values
/// rewrites byte-identical files.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub rule: String,
    pub seed: u64,
}

impl Header {
    pub fn new(command: &'static str, rule: &RuleSpec, seed: u64) -> Header {
        Header { tool: "difflife", version: env!("CARGO_PKG_VERSION"), command, rule: rule.to_string(), seed }
    }
}

/// A JSON object with the header fields first, then `body`.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    pub header: &'a Header,
    #[serde(flatten)]
    pub body: T,
}

pub fn out_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, header: &Header, body: T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Report { header, body })?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// One header line followed by one line per record.
pub struct JsonLines {
    path: PathBuf,
    text: String,
}

impl JsonLines {
    pub fn new(path: &Path, header: &Header) -> Result<JsonLines> {
        let mut lines = JsonLines { path: path.to_path_buf(), text: String::new() };
        lines.push(&Tagged { record: "header", body: header })?;
        Ok(lines)
    }

    pub fn push<T: Serialize>(&mut self, value: &T) -> Result<()> {
        self.text.push_str(&serde_json::to_string(value)?);
        self.text.push('\n');
        Ok(())
    }

    pub fn record<T: Serialize>(&mut self, kind: &'static str, body: T) -> Result<()> {
        self.push(&Tagged { record: kind, body })
    }

    pub fn finish(self) -> Result<()> {
        fs::write(&self.path, self.text).with_context(|| format!("cannot write {}", self.path.display()))
    }
}

#[derive(Serialize)]
struct Tagged<T: Serialize> {
    record: &'static str,
    #[serde(flatten)]
    body: T,
}

/// Plain (P1) portable bitmap of a toroidal grid: one pixel per cell, live
/// cells black.
pub fn write_pbm(path: &Path, grid: &Grid) -> Result<()> {
    let (w, h) = (grid.width(), grid.height());
    let mut out = Vec::with_capacity(16 + 2 * w * h);
    writeln!(out, "P1\n{w} {h}")?;
    let (ox, oy) = grid.origin();
    for y in 0..h as i64 {
        // P1 readers accept any whitespace, but lines stay under 70 chars.
        for (i, x) in (0..w as i64).enumerate() {
            if i > 0 && i % 34 == 0 {
                out.push(b'\n');
            } else if i > 0 {
                out.push(b' ');
            }
            out.push(if grid.get(ox + x, oy + y) { b'1' } else { b'0' });
        }
        out.push(b'\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}
