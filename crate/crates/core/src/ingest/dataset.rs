//! In-memory, sorted, deduplicated multi-channel dataset.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::parse::{deduplicate, parse_records, ChannelKind, ErrorReport};
use super::records::{BluetoothScan, CommEvent, CsvRecord, LocationFix, SurveyAnswer, WifiReading};
use crate::error::{Error, Result};
use crate::types::{Timestamp, UserId};

pub const ROSTER_HEADER: [&str; 2] = ["user_id", "device_id"];

/// Participant roster and Bluetooth device ownership.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roster {
    participants: BTreeSet<UserId>,
    devices: BTreeMap<String, UserId>,
}

impl Roster {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, user: UserId, device: Option<String>) -> Result<()> {
        if let Some(device) = device {
            if let Some(prev) = self.devices.get(&device) {
                if prev != &user {
                    return Err(Error::Format(format!(
                        "device `{device}` assigned to both {prev} and {user}"
                    )));
                }
            }
            self.devices.insert(device, user.clone());
        }
        self.participants.insert(user);
        Ok(())
    }

    pub fn participants(&self) -> &BTreeSet<UserId> {
        &self.participants
    }

    pub fn devices(&self) -> &BTreeMap<String, UserId> {
        &self.devices
    }

    pub fn is_participant(&self, user: &UserId) -> bool {
        self.participants.contains(user)
    }

    /// Participant owning `device`, or `None` for external devices.
    pub fn owner_of(&self, device: &str) -> Option<&UserId> {
        self.devices.get(device)
    }

    pub fn is_external(&self, device: &str) -> bool {
        !self.devices.contains_key(device)
    }

    /// Parse `roster.csv` (`user_id,device_id`); any bad row is fatal.
    pub fn read<R: Read>(stream: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(stream);
        let header = reader.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ROSTER_HEADER {
            return Err(Error::Format(format!(
                "roster: expected header `{}`",
                ROSTER_HEADER.join(",")
            )));
        }
        let mut roster = Roster::new();
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| Error::Format(format!("roster row {}: {e}", i + 2)))?;
            if row.len() != 2 {
                return Err(Error::Format(format!(
                    "roster row {}: expected 2 fields",
                    i + 2
                )));
            }
            let user = UserId::new(&row[0])
                .map_err(|_| Error::Format(format!("roster row {}: empty user_id", i + 2)))?;
            let device = (!row[1].is_empty()).then(|| row[1].to_string());
            roster.add(user, device)?;
        }
        Ok(roster)
    }

    pub fn write<W: std::io::Write>(&self, sink: W) -> Result<()> {
        let mut w = crate::csvio::csv_writer(sink);
        w.write_record(ROSTER_HEADER)?;
        let mut owned: BTreeSet<&UserId> = BTreeSet::new();
        for (device, user) in &self.devices {
            w.write_record([user.as_str(), device.as_str()])?;
            owned.insert(user);
        }
        for user in self.participants.iter().filter(|u| !owned.contains(u)) {
            w.write_record([user.as_str(), ""])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per-channel file locations; absent channels load as empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelPaths {
    pub bluetooth: Option<PathBuf>,
    pub wifi: Option<PathBuf>,
    pub location: Option<PathBuf>,
    pub comm: Option<PathBuf>,
    pub survey: Option<PathBuf>,
}

impl ChannelPaths {
    /// Conventional file names inside `dir`, keeping only those that exist.
    pub fn in_dir(dir: &Path) -> Self {
        let pick = |k: ChannelKind| {
            let p = dir.join(k.file_name());
            p.is_file().then_some(p)
        };
        ChannelPaths {
            bluetooth: pick(ChannelKind::Bluetooth),
            wifi: pick(ChannelKind::Wifi),
            location: pick(ChannelKind::Location),
            comm: pick(ChannelKind::Comm),
            survey: pick(ChannelKind::Survey),
        }
    }

    pub fn get(&self, kind: ChannelKind) -> Option<&PathBuf> {
        match kind {
            ChannelKind::Bluetooth => self.bluetooth.as_ref(),
            ChannelKind::Wifi => self.wifi.as_ref(),
            ChannelKind::Location => self.location.as_ref(),
            ChannelKind::Comm => self.comm.as_ref(),
            ChannelKind::Survey => self.survey.as_ref(),
        }
    }

    pub fn is_empty(&self) -> bool {
        ChannelKind::ALL.iter().all(|k| self.get(*k).is_none())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub roster: Roster,
    pub bluetooth: Vec<BluetoothScan>,
    pub wifi: Vec<WifiReading>,
    pub location: Vec<LocationFix>,
    pub comm: Vec<CommEvent>,
    pub survey: Vec<SurveyAnswer>,
}

fn prepare<T: CsvRecord>(records: Vec<T>) -> Vec<T> {
    let mut records = deduplicate(records);
    // Stable: survivors sharing (user, t) keep file order, which keeps
    // the readings of one WiFi scan contiguous.
    records.sort_by(|a, b| (a.user(), a.time()).cmp(&(b.user(), b.time())));
    records
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn load<T: CsvRecord>(path: Option<&PathBuf>, kind: ChannelKind) -> Result<(Vec<T>, Option<ErrorReport>)> {
    match path {
        None => Ok((Vec::new(), None)),
        Some(p) => {
            let (recs, report) = parse_records(open(p)?, kind).map_err(|e| match e {
                Error::Stream(io) => Error::io(p, io),
                Error::Format(m) => Error::Format(format!("{}: {m}", p.display())),
                other => other,
            })?;
            Ok((recs, Some(report)))
        }
    }
}

impl Dataset {
    /// Build from in-memory records: deduplicates and sorts every channel.
    pub fn from_records(
        roster: Roster,
        bluetooth: Vec<BluetoothScan>,
        wifi: Vec<WifiReading>,
        location: Vec<LocationFix>,
        comm: Vec<CommEvent>,
        survey: Vec<SurveyAnswer>,
    ) -> Self {
        Dataset {
            roster,
            bluetooth: prepare(bluetooth),
            wifi: prepare(wifi),
            location: prepare(location),
            comm: prepare(comm),
            survey: prepare(survey),
        }
    }

    /// Bluetooth sightings of devices not owned by any participant.
    pub fn external_sightings(&self) -> impl Iterator<Item = &BluetoothScan> {
        self.bluetooth
            .iter()
            .filter(|s| self.roster.is_external(&s.seen))
    }

    /// Number of distinct Bluetooth device ids ever seen.
    pub fn unique_devices(&self) -> usize {
        self.bluetooth
            .iter()
            .map(|s| s.seen.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn location_of(&self, user: &UserId) -> &[LocationFix] {
        user_slice(&self.location, user)
    }

    pub fn comm_of(&self, user: &UserId) -> &[CommEvent] {
        user_slice(&self.comm, user)
    }

    pub fn wifi_of(&self, user: &UserId) -> &[WifiReading] {
        user_slice(&self.wifi, user)
    }

    pub fn bluetooth_of(&self, user: &UserId) -> &[BluetoothScan] {
        user_slice(&self.bluetooth, user)
    }
}

/// Contiguous run of `user`'s records in a `(user, t)`-sorted channel.
pub fn user_slice<'a, T: CsvRecord>(records: &'a [T], user: &UserId) -> &'a [T] {
    let lo = records.partition_point(|r| r.user() < user);
    let hi = records.partition_point(|r| r.user() <= user);
    &records[lo..hi]
}

/// Records of `user` in `[from, to)`.
pub fn user_window<'a, T: CsvRecord>(
    records: &'a [T],
    user: &UserId,
    from: Timestamp,
    to: Timestamp,
) -> &'a [T] {
    let s = user_slice(records, user);
    let lo = s.partition_point(|r| r.time() < from);
    let hi = s.partition_point(|r| r.time() < to);
    &s[lo..hi]
}

/// Load channel files and the roster into a [`Dataset`].
///
/// Returns one [`ErrorReport`] per channel file that was read.
pub fn load_dataset(paths: &ChannelPaths, roster: &Path) -> Result<(Dataset, Vec<ErrorReport>)> {
    if paths.is_empty() {
        return Err(Error::invalid("no channel files given"));
    }
    let roster = Roster::read(open(roster)?).map_err(|e| match e {
        Error::Csv(c) => Error::Format(format!("roster: {c}")),
        other => other,
    })?;
    let (bluetooth, r1) = load(paths.bluetooth.as_ref(), ChannelKind::Bluetooth)?;
    let (wifi, r2) = load(paths.wifi.as_ref(), ChannelKind::Wifi)?;
    let (location, r3) = load(paths.location.as_ref(), ChannelKind::Location)?;
    let (comm, r4) = load(paths.comm.as_ref(), ChannelKind::Comm)?;
    let (survey, r5) = load(paths.survey.as_ref(), ChannelKind::Survey)?;
    let reports = [r1, r2, r3, r4, r5].into_iter().flatten().collect();
    Ok((
        Dataset::from_records(roster, bluetooth, wifi, location, comm, survey),
        reports,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn bluetooth_only_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let bt = write(
            dir.path(),
            "bluetooth.csv",
            "user_id,timestamp_s,seen_device,rssi_dbm\nu2,20,d1,-60\nu1,10,d2,-70\nu1,5,ext9,\nu1,10,d2,-70\n",
        );
        let roster = write(dir.path(), "roster.csv", "user_id,device_id\nu1,d1\nu2,d2\n");
        let paths = ChannelPaths {
            bluetooth: Some(bt),
            ..Default::default()
        };
        let (ds, reports) = load_dataset(&paths, &roster).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].accepted, 4);
        assert_eq!(ds.bluetooth.len(), 3);
        assert!(ds.wifi.is_empty() && ds.location.is_empty() && ds.comm.is_empty());
        assert_eq!(ds.bluetooth[0].t.seconds(), 5);
        assert_eq!(ds.bluetooth[2].observer.as_str(), "u2");
        assert_eq!(ds.external_sightings().count(), 1);
        assert_eq!(ds.unique_devices(), 3);
        let u1 = UserId::new("u1").unwrap();
        assert_eq!(ds.bluetooth_of(&u1).len(), 2);
        assert_eq!(
            user_window(&ds.bluetooth, &u1, Timestamp::new(6).unwrap(), Timestamp::new(11).unwrap()).len(),
            1
        );
    }

    #[test]
    fn missing_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let roster = write(dir.path(), "roster.csv", "user_id,device_id\nu1,d1\n");
        assert!(matches!(
            load_dataset(&ChannelPaths::default(), &roster),
            Err(Error::InvalidParameter(_))
        ));
        let paths = ChannelPaths {
            wifi: Some(dir.path().join("nope.csv")),
            ..Default::default()
        };
        assert!(matches!(load_dataset(&paths, &roster), Err(Error::Io { .. })));
    }

    #[test]
    fn unparseable_roster_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let bt = write(dir.path(), "bluetooth.csv", "user_id,timestamp_s,seen_device,rssi_dbm\n");
        let paths = ChannelPaths {
            bluetooth: Some(bt),
            ..Default::default()
        };
        for body in ["who,what\nu1,d1\n", "user_id,device_id\nu1\n", "user_id,device_id\nu1,d1\nu2,d1\n"] {
            let roster = write(dir.path(), "roster.csv", body);
            assert!(
                matches!(load_dataset(&paths, &roster), Err(Error::Format(_))),
                "{body:?}"
            );
        }
    }

    #[test]
    fn roster_round_trip() {
        let mut r = Roster::new();
        r.add(UserId::new("a").unwrap(), Some("da".into())).unwrap();
        r.add(UserId::new("b").unwrap(), None).unwrap();
        let mut buf = Vec::new();
        r.write(&mut buf).unwrap();
        assert_eq!(Roster::read(buf.as_slice()).unwrap(), r);
        assert_eq!(r.owner_of("da").unwrap().as_str(), "a");
        assert!(r.is_external("db"));
    }
}
