//! Output directory bookkeeping: CSV/JSON writers and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Collects the files a run writes into one directory.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.dir.join(name)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.text(name, &text)
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.record(name);
        fs::write(path, text)?;
        Ok(())
    }

    /// Header row, then one record per row; `None` cells stay empty.
    pub fn csv<R: Serialize>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let path = self.record(name);
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(mut self, command: &str, config_toml: &str, seed: u64) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            command,
            config_sha256: sha256_hex(config_toml.as_bytes()),
            seed,
            versions: Versions { rsos_core: rsos_core::VERSION, rsos_cli: env!("CARGO_PKG_VERSION") },
            files: self.files.clone(),
        };
        self.json("manifest.json", &manifest)?;
        Ok(self.dir)
    }
}

#[derive(Serialize)]
struct Versions {
    #[serde(rename = "rsos-core")]
    rsos_core: &'static str,
    #[serde(rename = "rsos-cli")]
    rsos_cli: &'static str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    /// Hash of `config.toml` as written next to the manifest.
    config_sha256: String,
    seed: u64,
    versions: Versions,
    files: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
