//! Channel record types and their fixed CSV row layouts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;
use crate::types::{Timestamp, UserId};

/// Inclusive RSSI range accepted for Bluetooth and WiFi readings.
pub const RSSI_RANGE_DBM: std::ops::RangeInclusive<i32> = -120..=0;

/// A record type with a fixed CSV header.
pub trait CsvRecord: Sized {
    const HEADER: &'static [&'static str];

    /// Parse one data row; the error string becomes a report entry.
    fn from_fields(fields: &[&str]) -> Result<Self, String>;

    fn to_fields(&self) -> Vec<String>;

    fn user(&self) -> &UserId;

    fn time(&self) -> Timestamp;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BluetoothScan {
    pub observer: UserId,
    pub t: Timestamp,
    pub seen: String,
    pub rssi: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WifiReading {
    pub user: UserId,
    pub t: Timestamp,
    pub ap: String,
    pub rssi: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationFix {
    pub user: UserId,
    pub t: Timestamp,
    pub point: GeoPoint,
    pub accuracy_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommChannel {
    Call,
    Sms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Incoming,
    Outgoing,
    Missed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommEvent {
    pub user: UserId,
    pub t: Timestamp,
    pub peer: String,
    pub channel: CommChannel,
    pub direction: Direction,
    pub duration_s: u32,
}

/// One Likert answer from `survey.csv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyAnswer {
    pub user: UserId,
    pub item: String,
    pub score: u8,
}

impl FromStr for CommChannel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "call" => Ok(CommChannel::Call),
            "sms" => Ok(CommChannel::Sms),
            other => Err(format!("unknown channel `{other}`")),
        }
    }
}

impl fmt::Display for CommChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommChannel::Call => "call",
            CommChannel::Sms => "sms",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "incoming" => Ok(Direction::Incoming),
            "outgoing" => Ok(Direction::Outgoing),
            "missed" => Ok(Direction::Missed),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Incoming => "incoming",
            Direction::Outgoing => "outgoing",
            Direction::Missed => "missed",
        })
    }
}

fn user(s: &str) -> Result<UserId, String> {
    UserId::new(s).map_err(|_| "empty user_id".to_string())
}

fn timestamp(s: &str) -> Result<Timestamp, String> {
    let v: i64 = s
        .parse()
        .map_err(|_| format!("timestamp `{s}` is not an integer"))?;
    Timestamp::new(v).map_err(|_| format!("timestamp {v} is negative"))
}

fn nonempty<'a>(name: &str, s: &'a str) -> Result<&'a str, String> {
    if s.is_empty() {
        Err(format!("empty {name}"))
    } else {
        Ok(s)
    }
}

fn rssi(s: &str) -> Result<i32, String> {
    let v: i32 = s
        .parse()
        .map_err(|_| format!("rssi `{s}` is not an integer"))?;
    if !RSSI_RANGE_DBM.contains(&v) {
        return Err(format!("rssi {v} dBm outside [-120, 0]"));
    }
    Ok(v)
}

fn float(name: &str, s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("{name} `{s}` is not a number"))
}

impl CsvRecord for BluetoothScan {
    const HEADER: &'static [&'static str] = &["user_id", "timestamp_s", "seen_device", "rssi_dbm"];

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        Ok(BluetoothScan {
            observer: user(f[0])?,
            t: timestamp(f[1])?,
            seen: nonempty("seen_device", f[2])?.to_string(),
            rssi: if f[3].is_empty() {
                None
            } else {
                Some(rssi(f[3])?)
            },
        })
    }

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.observer.to_string(),
            self.t.to_string(),
            self.seen.clone(),
            self.rssi.map(|r| r.to_string()).unwrap_or_default(),
        ]
    }

    fn user(&self) -> &UserId {
        &self.observer
    }

    fn time(&self) -> Timestamp {
        self.t
    }
}

impl CsvRecord for WifiReading {
    const HEADER: &'static [&'static str] = &["user_id", "timestamp_s", "ap_id", "rssi_dbm"];

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        Ok(WifiReading {
            user: user(f[0])?,
            t: timestamp(f[1])?,
            ap: nonempty("ap_id", f[2])?.to_string(),
            rssi: rssi(f[3])?,
        })
    }

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.user.to_string(),
            self.t.to_string(),
            self.ap.clone(),
            self.rssi.to_string(),
        ]
    }

    fn user(&self) -> &UserId {
        &self.user
    }

    fn time(&self) -> Timestamp {
        self.t
    }
}

impl CsvRecord for LocationFix {
    const HEADER: &'static [&'static str] =
        &["user_id", "timestamp_s", "lat_deg", "lon_deg", "accuracy_m"];

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        let lat = float("lat_deg", f[2])?;
        let lon = float("lon_deg", f[3])?;
        let point = GeoPoint::new(lat, lon).map_err(|e| match e {
            crate::Error::InvalidParameter(m) => m,
            other => other.to_string(),
        })?;
        let accuracy_m = float("accuracy_m", f[4])?;
        if !(accuracy_m.is_finite() && accuracy_m > 0.0) {
            return Err(format!("accuracy {accuracy_m} must be finite and positive"));
        }
        Ok(LocationFix {
            user: user(f[0])?,
            t: timestamp(f[1])?,
            point,
            accuracy_m,
        })
    }

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.user.to_string(),
            self.t.to_string(),
            self.point.lat().to_string(),
            self.point.lon().to_string(),
            self.accuracy_m.to_string(),
        ]
    }

    fn user(&self) -> &UserId {
        &self.user
    }

    fn time(&self) -> Timestamp {
        self.t
    }
}

impl CsvRecord for CommEvent {
    const HEADER: &'static [&'static str] = &[
        "user_id",
        "timestamp_s",
        "peer_hash",
        "channel",
        "direction",
        "duration_s",
    ];

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        let channel: CommChannel = f[3].parse()?;
        let direction: Direction = f[4].parse()?;
        let duration: i64 = f[5]
            .parse()
            .map_err(|_| format!("duration `{}` is not an integer", f[5]))?;
        if duration < 0 {
            return Err(format!("negative duration {duration}"));
        }
        let duration_s =
            u32::try_from(duration).map_err(|_| format!("duration {duration} too large"))?;
        if channel == CommChannel::Sms && duration_s != 0 {
            return Err("sms rows must have duration 0".into());
        }
        if direction == Direction::Missed && channel != CommChannel::Call {
            return Err("only calls can be missed".into());
        }
        if direction == Direction::Missed && duration_s != 0 {
            return Err("missed calls must have duration 0".into());
        }
        Ok(CommEvent {
            user: user(f[0])?,
            t: timestamp(f[1])?,
            peer: nonempty("peer_hash", f[2])?.to_string(),
            channel,
            direction,
            duration_s,
        })
    }

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.user.to_string(),
            self.t.to_string(),
            self.peer.clone(),
            self.channel.to_string(),
            self.direction.to_string(),
            self.duration_s.to_string(),
        ]
    }

    fn user(&self) -> &UserId {
        &self.user
    }

    fn time(&self) -> Timestamp {
        self.t
    }
}

impl CsvRecord for SurveyAnswer {
    const HEADER: &'static [&'static str] = &["user_id", "item_id", "score"];

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        let score: u8 = f[2]
            .parse()
            .map_err(|_| format!("score `{}` is not an integer", f[2]))?;
        if !(1..=5).contains(&score) {
            return Err(format!("score {score} outside [1, 5]"));
        }
        Ok(SurveyAnswer {
            user: user(f[0])?,
            item: nonempty("item_id", f[1])?.to_string(),
            score,
        })
    }

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.user.to_string(),
            self.item.clone(),
            self.score.to_string(),
        ]
    }

    fn user(&self) -> &UserId {
        &self.user
    }

    fn time(&self) -> Timestamp {
        Timestamp::default()
    }
}
