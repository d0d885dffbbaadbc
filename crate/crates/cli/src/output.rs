//! Artifact writing and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Artifact {
    path: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    inputs_sha256: &'a str,
    artifacts: &'a [Artifact],
    summary: &'a serde_json::Value,
    wall_time_s: f64,
    timestamp_unix: u64,
}

pub struct Output {
    dir: PathBuf,
    command: String,
    inputs_sha256: String,
    artifacts: Vec<Artifact>,
    started: Instant,
}

impl Output {
    pub fn create(dir: &Path, command: &str, inputs: &[u8]) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::validation(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            inputs_sha256: sha256_hex(inputs),
            artifacts: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Failure::validation(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(&path, bytes).map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Writes a CSV after checking every numeric cell is finite.
    pub fn write_csv(&mut self, name: &str, text: &str) -> Result<(), Failure> {
        check_finite_csv(text).map_err(|cell| Failure::finding(format!("non-finite value {cell:?} in {name}")))?;
        self.write(name, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::validation(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn finish(self, summary: serde_json::Value) -> Result<(), Failure> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            tool: "nsc",
            version: env!("CARGO_PKG_VERSION"),
            command: &self.command,
            inputs_sha256: &self.inputs_sha256,
            artifacts: &self.artifacts,
            summary: &summary,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            timestamp_unix: stamp,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::validation(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))
    }
}

/// Returns the first cell that reads as a non-finite number.
pub fn check_finite_csv(text: &str) -> Result<(), String> {
    for line in text.lines() {
        for cell in line.split(',') {
            let lower = cell.trim().to_ascii_lowercase();
            if matches!(lower.as_str(), "nan" | "inf" | "-inf" | "+inf" | "infinity" | "-infinity") {
                return Err(cell.to_string());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_check() {
        assert!(check_finite_csv("a,b\n1e0,2\n").is_ok());
        assert!(check_finite_csv("a,b\n1e0,NaN\n").is_err());
        assert!(check_finite_csv("a\n-inf\n").is_err());
        assert!(check_finite_csv("a,b\n1,\n").is_ok());
    }

    #[test]
    fn digest_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
