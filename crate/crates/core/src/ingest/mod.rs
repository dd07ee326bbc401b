//! Parsing, validation, deduplication and loading of the channel files.
//!
//! File layouts (UTF-8, `\n` line endings, header line required):
//!
//! | file | columns |
//! |------|---------|
//! | `bluetooth.csv` | `user_id,timestamp_s,seen_device,rssi_dbm` (rssi may be empty) |
//! | `wifi.csv` | `user_id,timestamp_s,ap_id,rssi_dbm` |
//! | `location.csv` | `user_id,timestamp_s,lat_deg,lon_deg,accuracy_m` |
//! | `comm.csv` | `user_id,timestamp_s,peer_hash,channel,direction,duration_s` |
//! | `survey.csv` | `user_id,item_id,score` |
//! | `roster.csv` | `user_id,device_id` |
//!
//! Readings of one WiFi scan share `(user_id, timestamp_s)` and must be
//! contiguous in the file.

mod dataset;
mod parse;
mod records;

pub use dataset::{load_dataset, user_slice, user_window, ChannelPaths, Dataset, Roster, ROSTER_HEADER};
pub use parse::{
    deduplicate, parse_channel, parse_records, write_records, ChannelKind, ErrorReport, Records,
    RowIssue,
};
pub use records::{
    BluetoothScan, CommChannel, CommEvent, CsvRecord, Direction, LocationFix, SurveyAnswer,
    WifiReading, RSSI_RANGE_DBM,
};
