//! Run manifests: a flat key-value file written next to each output.

use std::path::{Path, PathBuf};

use diamond_core::sweep::format_g12;
use diamond_core::{ClusterParams, Result};

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub params: ClusterParams,
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let p = &self.params;
        let outputs: Vec<String> = self.outputs.iter().map(|o| o.display().to_string()).collect();
        let mut lines = vec![
            format!("command = {}", self.command),
            format!("J = {}", format_g12(p.j)),
            format!("Jz = {}", format_g12(p.jz)),
            format!("J0 = {}", format_g12(p.j0)),
            format!("h = {}", format_g12(p.h)),
            format!("hp = {}", format_g12(p.hp)),
            format!("theta = {}", format_g12(self.theta)),
            format!("phi = {}", format_g12(self.phi)),
            format!("t = {}", format_g12(self.t)),
        ];
        lines.push(format!("seed = {}", self.seed.map_or("none".to_string(), |s| s.to_string())));
        lines.push(format!("outputs = {}", outputs.join(",")));
        lines.push(format!("tool_version = {}", self.tool_version));
        lines.join("\n") + "\n"
    }

    /// Path of the manifest belonging to `output`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest");
        output.with_file_name(name)
    }

    /// Writes one manifest beside every output; returns the manifest paths.
    pub fn write_all(&self) -> Result<Vec<PathBuf>> {
        let text = self.render();
        let mut written = Vec::new();
        for out in &self.outputs {
            let path = Self::path_for(out);
            std::fs::write(&path, &text)?;
            written.push(path);
        }
        Ok(written)
    }
}
