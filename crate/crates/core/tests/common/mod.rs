#![allow(dead_code)]

pub mod wifi_oracle;

use std::path::Path;

use proxnet_core::ingest::{load_dataset, ChannelPaths, Dataset};
use proxnet_core::synth::{generate, write_output, ScheduleSpec, SocialSpec, SynthConfig, SynthOutput, ROSTER_FILE};
use tempfile::TempDir;

/// Generates `cfg` and writes every output file into a fresh directory.
pub fn synth_on_disk(cfg: &SynthConfig) -> (TempDir, SynthOutput) {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(cfg).unwrap();
    write_output(&out, dir.path()).unwrap();
    (dir, out)
}

pub fn load(dir: &Path) -> Dataset {
    let (ds, reports) = load_dataset(&ChannelPaths::in_dir(dir), &dir.join(ROSTER_FILE)).unwrap();
    for r in &reports {
        assert!(r.is_clean(), "{r:?}");
    }
    ds
}

pub fn small(n_users: usize, n_days: u32) -> SynthConfig {
    SynthConfig {
        n_users,
        n_days,
        ..Default::default()
    }
}

/// One community, no evening venues, starting on a Monday.
pub fn commuters(n_users: usize, n_days: u32) -> SynthConfig {
    SynthConfig {
        n_users,
        n_days,
        start_date: "2013-10-07".into(),
        social: SocialSpec {
            communities: 1,
            ..Default::default()
        },
        schedule: ScheduleSpec {
            venue_prob: 0.0,
            ..Default::default()
        },
        ..Default::default()
    }
}
