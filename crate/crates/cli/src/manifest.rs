//! Run records: each command's result JSON plus an append-only manifest line.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifests.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    pub version: String,
    /// Milliseconds since the Unix epoch.
    pub started_ms: u128,
    pub finished_ms: u128,
    /// SHA-256 of the result file's bytes, hex encoded.
    pub result_digest: String,
    pub result_file: PathBuf,
}

pub fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Deterministic result bytes: pretty JSON with a trailing newline.
pub fn result_bytes<T: Serialize>(result: &T) -> serde_json::Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(result)?;
    v.push(b'\n');
    Ok(v)
}

pub struct Recorder {
    dir: PathBuf,
    command: String,
    params: serde_json::Value,
    seeds: Vec<u64>,
    started_ms: u128,
}

impl Recorder {
    pub fn start(dir: &Path, command: &str, params: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            params,
            seeds,
            started_ms: now_ms(),
        }
    }

    /// Writes the result file and appends the manifest line.
    pub fn finish(self, result: &[u8]) -> std::io::Result<RunManifest> {
        fs::create_dir_all(&self.dir)?;
        let hash = digest(result);
        let name = format!("{}-{}.json", self.command, &hash[..16]);
        fs::write(self.dir.join(&name), result)?;
        let m = RunManifest {
            command: self.command,
            params: self.params,
            seeds: self.seeds,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_ms: self.started_ms,
            finished_ms: now_ms(),
            result_digest: hash,
            result_file: PathBuf::from(name),
        };
        let mut line = serde_json::to_string(&m).map_err(std::io::Error::other)?;
        line.push('\n');
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.dir.join(MANIFEST_FILE))?
            .write_all(line.as_bytes())?;
        Ok(m)
    }
}

pub fn read_manifests(dir: &Path) -> std::io::Result<Vec<RunManifest>> {
    let text = match fs::read_to_string(dir.join(MANIFEST_FILE)) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(std::io::Error::other))
        .collect()
}

/// Whether the stored result still hashes to the recorded digest.
pub fn verify(dir: &Path, m: &RunManifest) -> std::io::Result<bool> {
    Ok(digest(&fs::read(dir.join(&m.result_file))?) == m.result_digest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..2 {
            let r = Recorder::start(dir.path(), "oracle", serde_json::json!({ "i": i }), vec![i]);
            r.finish(format!("{{\"x\":{i}}}\n").as_bytes()).unwrap();
        }
        let ms = read_manifests(dir.path()).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|m| verify(dir.path(), m).unwrap()));
        assert_eq!(ms[1].seeds, vec![1]);
        fs::write(dir.path().join(&ms[0].result_file), b"tampered").unwrap();
        assert!(!verify(dir.path(), &ms[0]).unwrap());
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
