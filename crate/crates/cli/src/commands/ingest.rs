use std::io::Write;

use serde::Serialize;

use proxnet_core::ingest::{load_dataset, ChannelKind, ChannelPaths, ErrorReport};

use super::Outcome;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::OutDir;

#[derive(Serialize)]
struct ChannelSummary<'a> {
    channel: String,
    file: &'a str,
    rows: usize,
    accepted: usize,
    rejected: usize,
    /// Records left after removing exact duplicates.
    loaded: usize,
}

#[derive(Serialize)]
struct IngestReport<'a> {
    participants: usize,
    devices: usize,
    channels: Vec<ChannelSummary<'a>>,
    reports: &'a [ErrorReport],
}

/// Parses every channel file found in the data directory. Row problems are
/// reported but are not fatal; unreadable headers or rosters are.
pub fn ingest(cfg: &RunConfig) -> Result<Outcome> {
    let dir = cfg.data_dir()?;
    let paths = ChannelPaths::in_dir(dir);
    if paths.is_empty() {
        return Err(CliError::usage(format!("no channel files in {}", dir.display())));
    }
    let (ds, reports) = load_dataset(&paths, &cfg.roster_path()?)?;
    let loaded = |c: ChannelKind| match c {
        ChannelKind::Bluetooth => ds.bluetooth.len(),
        ChannelKind::Wifi => ds.wifi.len(),
        ChannelKind::Location => ds.location.len(),
        ChannelKind::Comm => ds.comm.len(),
        ChannelKind::Survey => ds.survey.len(),
    };
    let channels: Vec<ChannelSummary> = reports
        .iter()
        .map(|r| ChannelSummary {
            channel: r.channel.to_string(),
            file: r.channel.file_name(),
            rows: r.rows(),
            accepted: r.accepted,
            rejected: r.rejected.len(),
            loaded: loaded(r.channel),
        })
        .collect();
    let notes = channels
        .iter()
        .map(|c| format!("{}: {} accepted, {} rejected", c.channel, c.accepted, c.rejected))
        .collect();

    let mut out = OutDir::create(&cfg.out)?;
    out.json(
        "ingest_report.json",
        &IngestReport {
            participants: ds.roster.participants().len(),
            devices: ds.roster.devices().len(),
            channels,
            reports: &reports,
        },
    )?;
    out.write("ingest_issues.csv", |w| {
        writeln!(w, "channel,line,reason")?;
        for r in &reports {
            for issue in &r.rejected {
                writeln!(w, "{},{},\"{}\"", r.channel, issue.line, issue.reason.replace('"', "\"\""))?;
            }
        }
        Ok(())
    })?;
    Ok(Outcome {
        command: "ingest",
        out_dir: out.path().to_path_buf(),
        files: out.into_files(),
        notes,
    })
}
