use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Output files held in memory until the run finishes.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: BTreeMap<PathBuf, Vec<u8>>,
}

impl Artifacts {
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        self.files.insert(PathBuf::from(name), bytes);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.insert(PathBuf::from(name), bytes);
        Ok(())
    }

    pub fn raw(&mut self, name: String, bytes: Vec<u8>) {
        self.files.insert(PathBuf::from(name), bytes);
    }

    pub fn names(&self) -> Vec<String> {
        self.files.keys().map(|p| p.display().to_string()).collect()
    }

    /// Writes every file via a temporary sibling and a rename.
    pub fn commit(&self, out_dir: &Path) -> Result<(), CliError> {
        for (name, bytes) in &self.files {
            let path = out_dir.join(name);
            let werr = |source| CliError::Write { path: path.clone(), source };
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(werr)?;
            }
            let mut tmp = path.clone().into_os_string();
            tmp.push(".tmp");
            fs::write(&tmp, bytes).map_err(werr)?;
            fs::rename(&tmp, &path).map_err(werr)?;
        }
        Ok(())
    }
}
