//! CSV formatting, atomic file writes and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Shortest decimal that parses back to the same `f64`. Very small or very
/// large magnitudes use exponent notation.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub started_unix_s: f64,
    pub wall_clock_s: f64,
    pub outputs: Vec<OutputFile>,
    pub notes: Vec<String>,
}

/// Collects the files of one command run.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<OutputFile>,
    notes: Vec<String>,
    started: SystemTime,
    clock: Instant,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            notes: Vec::new(),
            started: SystemTime::now(),
            clock: Instant::now(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.push(OutputFile {
            file: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        self.write(name, &table.to_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    /// Writes `<command>_manifest.json` and returns the manifest.
    pub fn finish<C: Serialize>(self, command: &str, seed: u64, config: &C) -> Result<RunManifest, CliError> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?;
        let canonical = serde_json::to_vec(&config).map_err(|e| CliError::Io(e.to_string()))?;
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_sha256: sha256_hex(&canonical),
            config,
            started_unix_s: self.started.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64()),
            wall_clock_s: self.clock.elapsed().as_secs_f64(),
            outputs: self.files,
            notes: self.notes,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        write_atomic(&self.dir.join(format!("{command}_manifest.json")), &bytes)?;
        Ok(manifest)
    }
}
