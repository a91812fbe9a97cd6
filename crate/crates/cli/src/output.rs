//! Output directory: artifacts, config echo, version stamp and a SHA-256 manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "MANIFEST.sha256";
pub const CONFIG_ECHO: &str = "config.toml";
pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const VERSION_FILE: &str = "VERSION";

pub fn version_stamp() -> String {
    format!(
        "dtc4 {} ({})",
        env!("CARGO_PKG_VERSION"),
        env!("DTC4_GIT_DESCRIBE")
    )
}

pub struct RunDir {
    root: PathBuf,
    written: Vec<String>,
}

impl RunDir {
    /// Creates `root` if needed; existing files are overwritten as they are rewritten.
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(RunDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush().with_context(|| format!("writing {}", path.display()))?;
        if !self.written.iter().any(|n| n == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    pub fn write_str(&mut self, name: &str, text: &str) -> Result<()> {
        self.write(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    /// Writes the config echo, resolved config and version stamp, then the
    /// manifest over every file written in this run.
    pub fn finish(mut self, config_text: &str, resolved: &str) -> Result<Vec<String>> {
        self.write_str(CONFIG_ECHO, config_text)?;
        self.write_str(RESOLVED_CONFIG, resolved)?;
        self.write_str(VERSION_FILE, &format!("{}\n", version_stamp()))?;
        let mut names = self.written.clone();
        names.sort();
        let mut lines = String::new();
        for name in &names {
            let bytes = fs::read(self.path(name)).with_context(|| format!("hashing {name}"))?;
            let digest = Sha256::digest(&bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            lines.push_str(&format!("{hex}  {name}\n"));
        }
        self.write_str(MANIFEST, &lines)?;
        Ok(names)
    }
}
