//! Provenance record written next to every output file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every resolved flag, defaults included.
    pub args: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    /// Input path as given on the command line -> lowercase hex SHA-256.
    pub input_hashes: BTreeMap<String, String>,
    pub tool_version: String,
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut hasher = Sha256::new();
    loop {
        let chunk = reader.fill_buf().map_err(|e| Error::io(path, e))?;
        if chunk.is_empty() {
            break;
        }
        hasher.update(chunk);
        let n = chunk.len();
        reader.consume(n);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// `<out>.manifest.json`, next to the output it describes.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new<A: Serialize>(command: &str, args: &A) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            args: serde_json::to_value(args)?,
            seeds: BTreeMap::new(),
            input_hashes: BTreeMap::new(),
            tool_version: TOOL_VERSION.to_string(),
        })
    }

    pub fn seed(mut self, name: &str, value: u64) -> Self {
        self.seeds.insert(name.to_string(), value);
        self
    }

    /// Hashes `path` and records it. A native embedding file also covers its sidecar.
    pub fn input(mut self, path: &Path) -> Result<Self> {
        self.input_hashes.insert(path.display().to_string(), sha256_file(path)?);
        let sidecar = crate::embedding::sidecar_path(path);
        if sidecar != path && sidecar.exists() {
            self.input_hashes.insert(sidecar.display().to_string(), sha256_file(&sidecar)?);
        }
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes the manifest for `output` and returns its path.
    pub fn write_for(&self, output: &Path) -> Result<PathBuf> {
        let path = manifest_path(output);
        std::fs::write(&path, self.to_json()?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    /// Recomputes every input hash; returns the paths whose content changed.
    pub fn stale_inputs(&self) -> Result<Vec<String>> {
        let mut stale = Vec::new();
        for (path, hash) in &self.input_hashes {
            match sha256_file(path) {
                Ok(h) if &h == hash => {}
                Ok(_) => stale.push(path.clone()),
                Err(Error::Io { .. }) => stale.push(path.clone()),
                Err(e) => return Err(e),
            }
        }
        Ok(stale)
    }
}
