//! Reconstruction and analysis of multi-channel human interaction networks
//! (Bluetooth face-to-face, WiFi co-location, calls/SMS) and mobility
//! patterns from raw phone sensor logs.

pub mod btnet;
pub mod comms;
mod csvio;
pub mod error;
pub mod geo;
pub mod ingest;
pub mod mobility;
pub mod netstats;
pub mod surveys;
pub mod synth;
pub mod time;
pub mod types;
pub mod wifiprox;

pub use error::{Error, Result};
pub use geo::{haversine, GeoPoint};
pub use time::{bin_index, weekly_bin, Binning, TimeBin};
pub use types::{Edge, Timestamp, UserId};
