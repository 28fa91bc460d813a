//! Run manifests: what was run, with which settings, and where the outputs went.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("fvk ", env!("CARGO_PKG_VERSION"));

/// Record of one invocation. The hash covers everything except the wall time,
/// so identical runs share a hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Canonical `key=value` settings, one per line.
    pub config: String,
    /// Extra options of the subcommand, canonical JSON.
    pub options: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Output file names relative to the output directory.
    pub outputs: Vec<String>,
    pub version: String,
    pub wall_time_s: f64,
    pub hash: String,
}

impl RunManifest {
    pub fn new(command: &str, config: String, options: serde_json::Value, seeds: Vec<u64>, outputs: &[&str]) -> Self {
        let mut m = RunManifest {
            command: command.into(),
            config,
            options,
            seeds,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            version: VERSION.into(),
            wall_time_s: 0.0,
            hash: String::new(),
        };
        m.hash = m.compute_hash();
        m
    }

    fn compute_hash(&self) -> String {
        let key = serde_json::json!({
            "command": self.command,
            "config": self.config,
            "options": self.options,
            "seeds": self.seeds,
            "outputs": self.outputs,
            "version": self.version,
        });
        let digest = Sha256::digest(key.to_string().as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Header lines for CSV files: the manifest hash and the settings.
    pub fn csv_preamble(&self) -> String {
        let mut s = format!("# manifest={}\n", self.hash);
        for line in self.config.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

/// Output directory plus the manifest that every file references.
pub struct Outputs {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl Outputs {
    pub fn new(dir: &Path, manifest: RunManifest) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Outputs { dir: dir.to_path_buf(), manifest })
    }

    /// CSV with the manifest preamble.
    pub fn csv(&self, name: &str, body: &str) -> std::io::Result<()> {
        std::fs::write(self.dir.join(name), format!("{}{body}", self.manifest.csv_preamble()))
    }

    /// JSON object with a `manifest` field added.
    pub fn json(&self, name: &str, mut value: serde_json::Value) -> std::io::Result<()> {
        if let Some(obj) = value.as_object_mut() {
            obj.insert("manifest".into(), self.manifest.hash.clone().into());
        }
        std::fs::write(self.dir.join(name), serde_json::to_string_pretty(&value).expect("json value") + "\n")
    }

    /// SVG with the manifest hash in a leading comment.
    pub fn svg(&self, name: &str, svg: &str) -> std::io::Result<()> {
        std::fs::write(self.dir.join(name), format!("<!-- manifest={} -->\n{svg}", self.manifest.hash))
    }

    /// Write `manifest.json` with the elapsed time.
    pub fn finish(mut self, wall_time_s: f64) -> std::io::Result<()> {
        self.manifest.wall_time_s = wall_time_s;
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(self.dir.join("manifest.json"), text + "\n")
    }
}
