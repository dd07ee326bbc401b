use proxnet_core::synth::{generate, write_output};

use super::Outcome;
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::OutDir;

/// Writes a synthetic dataset, its manifest and ground truth into the
/// output directory.
pub fn synth(cfg: &RunConfig) -> Result<Outcome> {
    let data = generate(&cfg.synth)?;
    let out = OutDir::create(&cfg.out)?;
    write_output(&data, out.path())?;
    let mut files: Vec<String> = std::fs::read_dir(out.path())
        .map_err(|e| proxnet_core::Error::Io {
            path: out.path().to_path_buf(),
            source: e,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    let notes = data
        .truth
        .manifest
        .records
        .iter()
        .map(|(k, v)| format!("{k}: {v} records"))
        .collect();
    Ok(Outcome {
        command: "synth",
        out_dir: out.path().to_path_buf(),
        files,
        notes,
    })
}
