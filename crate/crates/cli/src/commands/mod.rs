mod analysis;
mod btnet;
mod ingest;
mod netstats;
mod synth;

use std::fmt;
use std::path::{Path, PathBuf};

use proxnet_core::ingest::{load_dataset, ChannelKind, ChannelPaths, Dataset};

pub use analysis::{comms, mobility, survey, wifieval};
pub use btnet::btnet;
pub use ingest::ingest;
pub use netstats::netstats;
pub use synth::synth;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: &'static str,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: wrote {} file(s) to {}",
            self.command,
            self.files.len(),
            self.out_dir.display()
        )?;
        for n in &self.notes {
            write!(f, "\n  {n}")?;
        }
        Ok(())
    }
}

/// Paths of the requested channels inside `dir`; each must exist.
fn channel_paths(dir: &Path, kinds: &[ChannelKind]) -> Result<ChannelPaths> {
    let all = ChannelPaths::in_dir(dir);
    let mut out = ChannelPaths::default();
    for k in kinds {
        let p = all.get(*k).cloned().ok_or_else(|| {
            CliError::usage(format!("{} not found in {}", k.file_name(), dir.display()))
        })?;
        match k {
            ChannelKind::Bluetooth => out.bluetooth = Some(p),
            ChannelKind::Wifi => out.wifi = Some(p),
            ChannelKind::Location => out.location = Some(p),
            ChannelKind::Comm => out.comm = Some(p),
            ChannelKind::Survey => out.survey = Some(p),
        }
    }
    Ok(out)
}

/// Loads the listed channels plus the roster. Rejected rows are reported
/// as notes; the analysis proceeds on the accepted ones.
fn load(cfg: &RunConfig, kinds: &[ChannelKind], notes: &mut Vec<String>) -> Result<Dataset> {
    let paths = channel_paths(cfg.data_dir()?, kinds)?;
    let (ds, reports) = load_dataset(&paths, &cfg.roster_path()?)?;
    for r in reports.iter().filter(|r| !r.is_clean()) {
        notes.push(format!("{}: skipped {} malformed row(s)", r.channel, r.rejected.len()));
    }
    Ok(ds)
}

/// A file in the data directory unless given explicitly.
fn data_file(cfg: &RunConfig, explicit: &Option<PathBuf>, name: &str) -> Result<Option<PathBuf>> {
    if let Some(p) = explicit {
        crate::config::require_file(p, name)?;
        return Ok(Some(p.clone()));
    }
    let p = cfg.data_dir()?.join(name);
    Ok(p.is_file().then_some(p))
}
