use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ErgmError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Output directory that remembers a checksum for every file written.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(OutputDir { root, files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.files.retain(|f| f.path != rel);
        self.files.push(OutputFile { path: rel.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    }

    /// Writes a CSV table with a header line.
    pub fn write_csv(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| ErgmError::Io(std::io::Error::other(e));
        w.write_record(header).map_err(io)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(ErgmError::Domain(format!(
                    "{rel}: row has {} fields for {} columns",
                    row.len(),
                    header.len()
                )));
            }
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| ErgmError::Io(std::io::Error::other(e.to_string())))?;
        self.write(rel, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| ErgmError::Io(std::io::Error::other(e)))?;
        bytes.push(b'\n');
        self.write(rel, &bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// SHA-256 of the effective configuration (`config.toml` in the output directory).
    pub config_hash: String,
    pub seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub const FILE: &'static str = "manifest.json";

    /// Recomputes every output checksum; returns the paths that no longer match.
    pub fn verify(&self, root: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.outputs {
            match fs::read(root.join(&f.path)) {
                Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
                _ => bad.push(f.path.clone()),
            }
        }
        Ok(bad)
    }
}

/// Shortest round-trip float formatting, stable across runs.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_track_rewrites() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path().join("o")).unwrap();
        out.write_csv("a.csv", &["x", "y"], &[vec!["1".into(), "2".into()]]).unwrap();
        out.write("a.csv", b"x,y\n3,4\n").unwrap();
        assert_eq!(out.files().len(), 1);
        assert_eq!(out.files()[0].sha256, sha256_hex(b"x,y\n3,4\n"));
        assert!(out.write_csv("b.csv", &["x"], &[vec![]]).is_err());
        let m = RunManifest {
            command: "t".into(),
            version: "0".into(),
            config_hash: String::new(),
            seed: 0,
            started_unix: 0,
            finished_unix: 0,
            outputs: out.files().to_vec(),
        };
        assert!(m.verify(out.root()).unwrap().is_empty());
        fs::write(out.root().join("a.csv"), b"tampered").unwrap();
        assert_eq!(m.verify(out.root()).unwrap(), vec!["a.csv".to_string()]);
    }
}
