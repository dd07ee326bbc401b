use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Core(proxnet_core::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Output directory that records the files written into it.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        if root.exists() && !root.is_dir() {
            return Err(CliError::usage(format!("output path {} is not a directory", root.display())));
        }
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn into_files(self) -> Vec<String> {
        self.written
    }

    /// Creates `name` and hands a buffered writer to `fill`.
    pub fn write<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> proxnet_core::Result<()>,
    {
        let path = self.root.join(name);
        let mut w = File::create(&path).map(BufWriter::new).map_err(|e| io_err(&path, e))?;
        fill(&mut w)?;
        w.flush().map_err(|e| io_err(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Pretty JSON with a trailing newline.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }
}
