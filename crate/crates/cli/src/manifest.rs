//! Per-run manifest: the resolved configuration, tool version, wall-clock
//! duration, and a digest of every emitted file.

use std::path::PathBuf;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::Failure;

pub struct RunManifest {
    command: &'static str,
    config: serde_json::Value,
    started: Instant,
    out_dir: PathBuf,
    outputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &'static str, out_dir: &str, config: serde_json::Value) -> Result<Self, Failure> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| Failure::usage("config_error", format!("cannot create {out_dir}: {e}")))?;
        Ok(Self {
            command,
            config,
            started: Instant::now(),
            out_dir: PathBuf::from(out_dir),
            outputs: Vec::new(),
        })
    }

    /// Write one output file and record its digest.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| Failure::usage("config_error", format!("cannot write {name}: {e}")))?;
        let digest = Sha256::digest(contents.as_bytes());
        self.outputs.push((name.to_string(), format!("{digest:x}")));
        Ok(())
    }

    /// Finalize: write `manifest.json` naming every emitted file.
    pub fn finish(self) -> Result<(), Failure> {
        let manifest = serde_json::json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "duration_seconds": self.started.elapsed().as_secs_f64(),
            "config": self.config,
            "outputs": self
                .outputs
                .iter()
                .map(|(name, sha)| serde_json::json!({ "path": name, "sha256": sha }))
                .collect::<Vec<_>>(),
        });
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, format!("{manifest:#}\n"))
            .map_err(|e| Failure::usage("config_error", format!("cannot write manifest: {e}")))?;
        Ok(())
    }
}
