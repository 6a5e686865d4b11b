//! Result directories: `<root>/<experiment>/<timestamp>/`.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

/// Files and summary lines produced by one experiment, written in one go.
#[derive(Debug, Default, Clone)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Vec<(String, String)>,
}

impl Artifacts {
    pub fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn summary_text(&self) -> String {
        self.summary.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Creates a fresh run directory; a numeric suffix keeps concurrent runs
/// in the same second apart.
pub fn create_run_dir(root: &Path, experiment: &str) -> std::io::Result<PathBuf> {
    let parent = root.join(experiment);
    fs::create_dir_all(&parent)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    for k in 0.. {
        let name = if k == 0 { stamp.clone() } else { format!("{stamp}-{k}") };
        let dir = parent.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

pub fn write_run(dir: &Path, snapshot: &str, art: &Artifacts) -> std::io::Result<()> {
    fs::write(dir.join("config.snapshot"), snapshot)?;
    for (name, bytes) in &art.files {
        fs::write(dir.join(name), bytes)?;
    }
    fs::write(dir.join("summary.txt"), art.summary_text())
}
