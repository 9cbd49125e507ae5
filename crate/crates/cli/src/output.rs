use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::args::Format;
use crate::config::RunConfig;

/// Writes result files into one directory, stamping each with the config hash.
pub struct Output {
    dir: PathBuf,
    config: serde_json::Value,
    hash: String,
}

impl Output {
    pub fn new(dir: &Path, config: &RunConfig) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config: config.to_json(),
            hash: config.sha256(),
        })
    }

    fn put(&self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    /// CSV whose body comes from `body`, after a `# config_sha256=` line.
    pub fn csv_with<F>(&self, name: &str, body: F) -> anyhow::Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> plexsim::Result<()>,
    {
        let mut buf = format!("# config_sha256={}\n", self.hash).into_bytes();
        body(&mut buf)?;
        self.put(name, &buf)
    }

    /// JSON object carrying the hash, the config and `payload` under `key`.
    pub fn json<T: Serialize>(&self, name: &str, key: &str, payload: &T) -> anyhow::Result<()> {
        let doc = serde_json::json!({
            "config_sha256": self.hash,
            "config": self.config,
            key: payload,
        });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        self.put(name, &bytes)
    }

    /// Row table as `<stem>.csv` or `<stem>.json`.
    pub fn table<T: Serialize>(
        &self,
        stem: &str,
        rows: &[T],
        format: Format,
    ) -> anyhow::Result<()> {
        match format {
            Format::Csv => self.csv_with(&format!("{stem}.csv"), |buf| {
                let mut w = csv::Writer::from_writer(buf);
                for row in rows {
                    w.serialize(row)?;
                }
                w.flush().map_err(csv::Error::from)?;
                Ok(())
            }),
            Format::Json => self.json(&format!("{stem}.json"), "rows", &rows),
        }
    }

    /// The config snapshot on its own, for re-running.
    pub fn snapshot(&self) -> anyhow::Result<()> {
        let command = self.config["command"].as_str().unwrap_or("run");
        let doc = serde_json::json!({ "config_sha256": self.hash, "config": self.config });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        self.put(&format!("{command}.config.json"), &bytes)
    }
}
