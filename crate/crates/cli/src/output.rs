use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::Settings;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Generator {
    pub name: &'static str,
    pub version: &'static str,
    pub git: &'static str,
}

pub const GENERATOR: Generator =
    Generator { name: "cogsim", version: env!("CARGO_PKG_VERSION"), git: env!("COGSIM_GIT_DESCRIBE") };

/// Top-level layout shared by every JSON output.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub generator: &'a Generator,
    #[serde(flatten)]
    pub body: &'a T,
    pub config: &'a Settings,
}

pub fn to_json<T: Serialize>(body: &T, config: &Settings) -> Result<Vec<u8>, CliError> {
    let env = Envelope { schema_version: SCHEMA_VERSION, generator: &GENERATOR, body, config };
    let mut bytes =
        serde_json::to_vec_pretty(&env).map_err(|e| CliError::compute(format!("serializing output: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Output files written to temporaries in the target directory and renamed
/// into place only by [`Staged::commit`], so a failed command leaves no
/// partial outputs behind.
pub struct Staged {
    dir: PathBuf,
    files: Vec<(PathBuf, NamedTempFile)>,
}

impl Staged {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::data(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Staged { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn add(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let io_err = |e: std::io::Error| CliError::data(format!("writing {name} in {}: {e}", self.dir.display()));
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        tmp.write_all(bytes).map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        self.files.push((self.dir.join(name), tmp));
        Ok(())
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, body: &T, config: &Settings) -> Result<(), CliError> {
        let bytes = to_json(body, config)?;
        self.add(name, &bytes)
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::with_capacity(self.files.len());
        for (path, tmp) in self.files {
            tmp.persist(&path).map_err(|e| CliError::data(format!("cannot write {}: {}", path.display(), e.error)))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_lands_before_commit() {
        let dir = tempfile::tempdir().unwrap();
        let mut staged = Staged::new(dir.path()).unwrap();
        staged.add("a.txt", b"hello").unwrap();
        assert!(!dir.path().join("a.txt").exists());
        drop(staged);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn commit_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut staged = Staged::new(dir.path()).unwrap();
        staged.add("a.txt", b"hello").unwrap();
        let written = staged.commit().unwrap();
        assert_eq!(written, vec![dir.path().join("a.txt")]);
        assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), b"hello");
    }

    #[test]
    fn envelope_layout() {
        #[derive(Serialize)]
        struct Body {
            k: usize,
        }
        let bytes = to_json(&Body { k: 3 }, &Settings::default()).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["k"], 3);
        assert_eq!(v["generator"]["name"], "cogsim");
    }
}
