use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> anyhow::Result<Self> {
        let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Self::of_bytes(path.display().to_string(), &data))
    }

    fn of_bytes(path: String, data: &[u8]) -> Self {
        Self {
            path,
            bytes: data.len() as u64,
            sha256: format!("{:x}", Sha256::digest(data)),
        }
    }
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub command: &'a str,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub timestamp: String,
    pub seed: Option<u64>,
    pub config: &'a C,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Files destined for one output directory. Nothing touches the disk until
/// [`OutputDir::finish`], so a failed run leaves no half-written directory.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
    adopted: Vec<String>,
}

impl OutputDir {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            adopted: Vec::new(),
        }
    }

    pub fn write(&mut self, name: &str, data: impl AsRef<[u8]>) -> anyhow::Result<()> {
        anyhow::ensure!(name != MANIFEST_FILE, "{MANIFEST_FILE} is reserved");
        self.files.push((name.to_string(), data.as_ref().to_vec()));
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text)
    }

    /// Lists a file that another writer already placed in the directory.
    pub fn adopt(&mut self, name: &str) {
        self.adopted.push(name.to_string());
    }

    /// Writes every buffered file plus the manifest.
    pub fn finish<C: Serialize>(self, command: &str, config: &C, seed: Option<u64>, inputs: &[PathBuf]) -> anyhow::Result<()> {
        let inputs = inputs.iter().map(|p| FileDigest::of(p)).collect::<anyhow::Result<Vec<_>>>()?;
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let mut outputs = Vec::with_capacity(self.files.len());
        for (name, data) in &self.files {
            let path = self.dir.join(name);
            fs::write(&path, data).with_context(|| format!("writing {}", path.display()))?;
            outputs.push(FileDigest::of_bytes(name.clone(), data));
        }
        for name in &self.adopted {
            let mut d = FileDigest::of(&self.dir.join(name))?;
            d.path = name.clone();
            outputs.push(d);
        }
        let manifest = RunManifest {
            command,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed,
            config,
            inputs,
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
