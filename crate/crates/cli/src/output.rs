//! Byte-stable CSV and manifest rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use relecho::C64;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Fixed scientific format with full double precision.
pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}

/// `t,re_f,im_f,F,method` rows.
pub fn series_csv(times: &[f64], amplitude: &[C64], fidelity: &[f64], method: &str) -> String {
    let mut out = String::from("t,re_f,im_f,F,method\n");
    for ((t, f), big) in times.iter().zip(amplitude).zip(fidelity) {
        let _ = writeln!(out, "{},{},{},{},{method}", num(*t), num(f.re), num(f.im), num(*big));
    }
    out
}

/// Header plus rows of preformatted cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Files produced by one command, written together at the end.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, String)>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone)]
pub struct Warning {
    pub numerical: bool,
    pub message: String,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn warn(&mut self, numerical: bool, message: impl Into<String>) {
        self.warnings.push(Warning {
            numerical,
            message: message.into(),
        });
    }

    pub fn write_all(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

/// Key-value run manifest.
pub struct Manifest<'a> {
    pub command: &'a str,
    pub scenario: &'a str,
    pub config_path: &'a str,
    pub config_bytes: &'a [u8],
    pub seed: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub outputs: &'a Outputs,
}

impl Manifest<'_> {
    pub fn render(&self) -> String {
        let names: Vec<&str> = self.outputs.files.iter().map(|(n, _)| n.as_str()).collect();
        let warnings: Vec<&str> = self.outputs.warnings.iter().map(|w| w.message.as_str()).collect();
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "scenario = {}", self.scenario);
        let _ = writeln!(s, "config = {}", self.config_path);
        let _ = writeln!(s, "config_sha256 = {}", sha256_hex(self.config_bytes));
        let _ = writeln!(s, "library_version = {}", relecho::VERSION);
        let _ = writeln!(s, "cli_version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "threads = {}", self.threads);
        let _ = writeln!(s, "wall_time_s = {:.6}", self.wall_time_s);
        let _ = writeln!(s, "outputs = {}", names.join(" "));
        let _ = writeln!(s, "warnings = {}", warnings.join(" | "));
        s
    }
}
