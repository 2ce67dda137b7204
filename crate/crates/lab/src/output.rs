//! Run directories: CSV tables, JSON summaries and the manifest.
//!
//! Every CSV starts with a comment line `#config_hash=<hex>,seed=<n>` and
//! every JSON summary carries `config_hash` and `seed` fields.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Environment variable naming the output root.
pub const OUTPUT_ENV: &str = "SCORESMOOTH_OUT";

/// Bump when a CSV column contract changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub fn output_root(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output_dir {
        return PathBuf::from(p);
    }
    std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub description: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub figure: String,
    pub config_hash: String,
    pub seed: u64,
    pub csv_schema_version: u32,
    pub files: Vec<ManifestEntry>,
}

/// Writes the files of one run and records them in its manifest.
pub struct RunWriter {
    dir: PathBuf,
    hash: String,
    seed: u64,
    figure: String,
    experiment: String,
    files: Vec<ManifestEntry>,
}

impl RunWriter {
    /// Creates `root/<experiment>` and echoes the config into it.
    pub fn create(root: &Path, config: &ExperimentConfig, figure: &str) -> anyhow::Result<Self> {
        let dir = root.join(config.kind.name());
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let mut w = Self {
            dir,
            hash: config.hash(),
            seed: config.seed,
            figure: figure.to_string(),
            experiment: config.kind.name().to_string(),
            files: Vec::new(),
        };
        w.write_text(
            "config.json",
            &config.to_json(),
            "the run configuration, verbatim",
        )?;
        Ok(w)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    fn record(&mut self, name: &str, description: &str) {
        self.files.push(ManifestEntry {
            file: name.to_string(),
            description: description.to_string(),
        });
    }

    pub fn write_text(
        &mut self,
        name: &str,
        text: &str,
        description: &str,
    ) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.record(name, description);
        Ok(path)
    }

    /// Writes a CSV table; values are formatted with Rust's shortest round-trip form.
    pub fn write_csv<R, I>(
        &mut self,
        name: &str,
        header: &[&str],
        rows: I,
        description: &str,
    ) -> anyhow::Result<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: ToString,
    {
        let path = self.dir.join(name);
        let mut file = std::io::BufWriter::new(
            fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?,
        );
        writeln!(file, "#config_hash={},seed={}", self.hash, self.seed)?;
        let mut csv = csv::Writer::from_writer(file);
        csv.write_record(header)?;
        for row in rows {
            let fields: Vec<String> = row.into_iter().map(|v| v.to_string()).collect();
            csv.write_record(&fields)?;
        }
        csv.flush()?;
        self.record(name, description);
        Ok(path)
    }

    /// Writes `value` as pretty JSON with `config_hash` and `seed` fields prepended.
    pub fn write_json<T: Serialize>(
        &mut self,
        name: &str,
        value: &T,
        description: &str,
    ) -> anyhow::Result<PathBuf> {
        let mut obj = serde_json::Map::new();
        obj.insert("config_hash".into(), self.hash.clone().into());
        obj.insert("seed".into(), self.seed.into());
        match serde_json::to_value(value)? {
            serde_json::Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(obj))?;
        self.write_text(name, &(text + "\n"), description)
    }

    /// Writes `manifest.json` and returns the run directory.
    pub fn finish(self) -> anyhow::Result<PathBuf> {
        let mut files = self.files;
        files.push(ManifestEntry {
            file: "manifest.json".into(),
            description: "this file".into(),
        });
        let manifest = Manifest {
            experiment: self.experiment,
            figure: self.figure,
            config_hash: self.hash,
            seed: self.seed,
            csv_schema_version: CSV_SCHEMA_VERSION,
            files,
        };
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(self.dir)
    }
}
