//! Streaming CSV parsing with per-row error reports.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::records::{BluetoothScan, CommEvent, CsvRecord, LocationFix, SurveyAnswer, WifiReading};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bluetooth,
    Wifi,
    Location,
    Comm,
    Survey,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 5] = [
        ChannelKind::Bluetooth,
        ChannelKind::Wifi,
        ChannelKind::Location,
        ChannelKind::Comm,
        ChannelKind::Survey,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Bluetooth => "bluetooth",
            ChannelKind::Wifi => "wifi",
            ChannelKind::Location => "location",
            ChannelKind::Comm => "comm",
            ChannelKind::Survey => "survey",
        }
    }

    /// Conventional file name inside a dataset directory.
    pub fn file_name(self) -> &'static str {
        match self {
            ChannelKind::Bluetooth => "bluetooth.csv",
            ChannelKind::Wifi => "wifi.csv",
            ChannelKind::Location => "location.csv",
            ChannelKind::Comm => "comm.csv",
            ChannelKind::Survey => "survey.csv",
        }
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown channel kind `{s}`")))
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rejected row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIssue {
    /// 1-based line number in the source file.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub channel: ChannelKind,
    pub accepted: usize,
    pub rejected: Vec<RowIssue>,
}

impl ErrorReport {
    pub fn rows(&self) -> usize {
        self.accepted + self.rejected.len()
    }

    pub fn is_clean(&self) -> bool {
        self.rejected.is_empty()
    }
}

/// Records of one channel, tagged by kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Bluetooth(Vec<BluetoothScan>),
    Wifi(Vec<WifiReading>),
    Location(Vec<LocationFix>),
    Comm(Vec<CommEvent>),
    Survey(Vec<SurveyAnswer>),
}

impl Records {
    pub fn len(&self) -> usize {
        match self {
            Records::Bluetooth(v) => v.len(),
            Records::Wifi(v) => v.len(),
            Records::Location(v) => v.len(),
            Records::Comm(v) => v.len(),
            Records::Survey(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parse a channel stream whose kind is named at runtime.
pub fn parse_channel<R: Read>(stream: R, kind: &str) -> Result<(Records, ErrorReport)> {
    let kind: ChannelKind = kind.parse()?;
    Ok(match kind {
        ChannelKind::Bluetooth => {
            let (r, e) = parse_records(stream, kind)?;
            (Records::Bluetooth(r), e)
        }
        ChannelKind::Wifi => {
            let (r, e) = parse_records(stream, kind)?;
            (Records::Wifi(r), e)
        }
        ChannelKind::Location => {
            let (r, e) = parse_records(stream, kind)?;
            (Records::Location(r), e)
        }
        ChannelKind::Comm => {
            let (r, e) = parse_records(stream, kind)?;
            (Records::Comm(r), e)
        }
        ChannelKind::Survey => {
            let (r, e) = parse_records(stream, kind)?;
            (Records::Survey(r), e)
        }
    })
}

/// Parse a stream of typed records.
///
/// The first line must be the exact header. Every later non-blank line is
/// either accepted or listed in the report with its line number.
pub fn parse_records<R: Read, T: CsvRecord>(
    stream: R,
    channel: ChannelKind,
) -> Result<(Vec<T>, ErrorReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(stream);
    let mut report = ErrorReport {
        channel,
        accepted: 0,
        rejected: Vec::new(),
    };
    let mut out = Vec::new();
    let mut row = csv::ByteRecord::new();
    let mut header_seen = false;
    loop {
        let more = match reader.read_byte_record(&mut row) {
            Ok(more) => more,
            Err(e) => match e.into_kind() {
                csv::ErrorKind::Io(io) => return Err(Error::Stream(io)),
                other => {
                    // Malformed quoting and the like; report and keep going.
                    let line = reader.position().line();
                    report.rejected.push(RowIssue {
                        line,
                        reason: format!("unparseable row: {other:?}"),
                    });
                    continue;
                }
            },
        };
        if !more {
            break;
        }
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let fields: std::result::Result<Vec<&str>, _> =
            row.iter().map(std::str::from_utf8).collect();
        if !header_seen {
            header_seen = true;
            let fields = fields.map_err(|_| Error::Format(format!("{channel}: header is not UTF-8")))?;
            if fields != T::HEADER {
                return Err(Error::Format(format!(
                    "{channel}: expected header `{}`, found `{}`",
                    T::HEADER.join(","),
                    fields.join(",")
                )));
            }
            continue;
        }
        let parsed = match fields {
            Err(_) => Err("row is not valid UTF-8".to_string()),
            Ok(f) if f.len() != T::HEADER.len() => Err(format!(
                "expected {} fields, found {}",
                T::HEADER.len(),
                f.len()
            )),
            Ok(f) => T::from_fields(&f),
        };
        match parsed {
            Ok(rec) => {
                report.accepted += 1;
                out.push(rec);
            }
            Err(reason) => report.rejected.push(RowIssue { line, reason }),
        }
    }
    if !header_seen {
        return Err(Error::Format(format!("{channel}: missing header line")));
    }
    Ok((out, report))
}

/// Write records with their header, `\n` line endings.
pub fn write_records<W: Write, T: CsvRecord>(sink: W, records: &[T]) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(T::HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Remove exact duplicates, keeping the first occurrence of each row.
pub fn deduplicate<T: CsvRecord>(records: Vec<T>) -> Vec<T> {
    let mut seen = HashSet::with_capacity(records.len());
    records
        .into_iter()
        .filter(|r| seen.insert(r.to_fields()))
        .collect()
}
