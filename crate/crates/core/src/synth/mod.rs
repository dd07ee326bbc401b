//! Seeded generator of multi-channel traces with planted ground truth.
//!
//! Agents follow a weekly routine between homes, community classrooms and
//! evening venues. Everyone at a place stands on the same point, so
//! co-located agents see identical WiFi and always sight each other over
//! Bluetooth. Places are spaced beyond radio reach, and commutes run along
//! private corridors outside the city, so agents at different places never
//! sight each other.
//!
//! Output files use the ingest formats, plus `roster.csv`, `key.csv`, `phones.csv`,
//! `manifest.json` and `ground_truth.json`.

mod config;
mod generate;
mod truth;
mod world;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

pub use config::{ApGridSpec, CommSpec, LocationSpec, RadioSpec, ScheduleSpec, SocialSpec, SurveySpec, SynthConfig};
pub use generate::{generate, SynthOutput};
pub use truth::{oracle_networks, CoPresenceRun, GroundTruth, Manifest, PlantedStop};
pub use world::{Place, PlaceKind};

use crate::comms::PhoneDirectory;
use crate::error::{Error, Result};
use crate::ingest::{write_records, ChannelKind};

pub const ROSTER_FILE: &str = "roster.csv";
pub const KEY_FILE: &str = "key.csv";
pub const PHONES_FILE: &str = "phones.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| Error::io(&path, e))
}

fn finish(mut w: BufWriter<File>, dir: &Path, name: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(dir.join(name), e))
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(dir.join(name), e))?;
    finish(w, dir, name)
}

/// Writes every channel plus roster, key, manifest and ground truth into `dir`.
pub fn write_output(out: &SynthOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    macro_rules! channel {
        ($kind:expr, $records:expr) => {{
            let name = $kind.file_name();
            let mut w = create(dir, name)?;
            write_records(&mut w, $records)?;
            finish(w, dir, name)?;
        }};
    }
    channel!(ChannelKind::Bluetooth, &out.bluetooth);
    channel!(ChannelKind::Wifi, &out.wifi);
    channel!(ChannelKind::Location, &out.location);
    channel!(ChannelKind::Comm, &out.comm);
    channel!(ChannelKind::Survey, &out.survey);

    let mut w = create(dir, ROSTER_FILE)?;
    out.roster.write(&mut w)?;
    finish(w, dir, ROSTER_FILE)?;
    let mut w = create(dir, KEY_FILE)?;
    out.key.write(&mut w)?;
    finish(w, dir, KEY_FILE)?;
    let phones = PhoneDirectory::new(out.truth.phone_ids.iter().map(|(u, h)| (u.clone(), h.clone())))?;
    let mut w = create(dir, PHONES_FILE)?;
    phones.write(&mut w)?;
    finish(w, dir, PHONES_FILE)?;

    write_json(dir, MANIFEST_FILE, &out.truth.manifest)?;
    write_json(dir, GROUND_TRUTH_FILE, &out.truth)
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::btnet::{aggregate, build_networks, span};
    use crate::time::Binning;
    use std::collections::BTreeMap;

    fn small() -> SynthConfig {
        SynthConfig {
            n_users: 8,
            n_days: 2,
            ..Default::default()
        }
    }

    #[test]
    fn validation_lists_every_violation() {
        let cfg = SynthConfig {
            n_users: 1,
            n_days: 0,
            social: SocialSpec {
                p_intra: 1.5,
                ..Default::default()
            },
            ..Default::default()
        };
        match cfg.validate() {
            Err(Error::Validation(v)) => assert!(v.len() >= 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
        assert!(generate(&cfg).is_err());
    }

    #[test]
    fn deterministic() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.location, b.location);
        assert_eq!(a.bluetooth, b.bluetooth);
        assert_eq!(a.comm, b.comm);
        assert_eq!(a.truth, b.truth);
        let c = generate(&SynthConfig { seed: 2, ..small() }).unwrap();
        assert_ne!(a.comm, c.comm);
    }

    #[test]
    fn two_users_all_day_together() {
        // One community and no venues or transit: both always share a place.
        let cfg = SynthConfig {
            n_users: 2,
            n_days: 1,
            start_date: "2013-10-12".into(),
            social: SocialSpec {
                communities: 1,
                ..Default::default()
            },
            schedule: ScheduleSpec {
                venue_prob: 0.0,
                ..Default::default()
            },
            ..Default::default()
        };
        let out = generate(&cfg).unwrap();
        // Saturday: each user is home, alone.
        assert!(out.truth.copresence.is_empty());
        let mut cfg = cfg;
        cfg.start_date = "2013-10-14".into();
        let out = generate(&cfg).unwrap();
        let runs = &out.truth.copresence;
        assert_eq!(runs.len(), 1);
        let class_bins = (cfg.schedule.class_end_h - cfg.schedule.class_start_h) as u64 * 3600 / 300;
        assert_eq!(runs[0].bins(), class_bins);
        assert_eq!(oracle_networks(&out.truth).unwrap().len() as u64, class_bins);
    }

    #[test]
    fn bluetooth_matches_planted_copresence() {
        let out = generate(&small()).unwrap();
        let binning = Binning::default();
        let nets = build_networks(&out.bluetooth, &out.roster, binning, None);
        let agg = aggregate(&nets, span(&nets).unwrap()).unwrap();
        let got: BTreeMap<_, _> = agg.weights().clone();
        assert_eq!(got, out.truth.copresence_counts());
        assert_eq!(nets, oracle_networks(&out.truth).unwrap());
    }

    #[test]
    fn write_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let out = generate(&small()).unwrap();
        write_output(&out, dir.path()).unwrap();
        for f in ["bluetooth.csv", "wifi.csv", "location.csv", "comm.csv", "survey.csv", ROSTER_FILE, KEY_FILE, PHONES_FILE, MANIFEST_FILE] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let gt = read_ground_truth(&dir.path().join(GROUND_TRUTH_FILE)).unwrap();
        assert_eq!(gt, out.truth);
    }
}
