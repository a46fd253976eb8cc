use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Collects files of one run under an output directory. Each file is written
/// to a temporary sibling and renamed into place.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.tmp"));
        let mut f =
            fs::File::create(&tmp).with_context(|| format!("cannot write {}", tmp.display()))?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, &target)
            .with_context(|| format!("cannot move {} into place", target.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Writes `manifest.json` listing the command, its configuration and the
    /// files written so far.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a, C> {
            command: &'a str,
            version: &'a str,
            config: &'a C,
            outputs: &'a [String],
        }
        let outputs = self.written.clone();
        self.write_json(
            "manifest.json",
            &Manifest {
                command,
                version: env!("CARGO_PKG_VERSION"),
                config,
                outputs: &outputs,
            },
        )
    }
}
