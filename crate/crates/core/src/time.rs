//! Fixed-width time binning and local weekly calendar bins.

use chrono::{Datelike, TimeZone, Timelike};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Timestamp;

/// Default bin width: the 5-minute Bluetooth scan period.
pub const DEFAULT_BIN_WIDTH_S: i64 = 300;

/// Default zone for weekly profiles.
pub const DEFAULT_TZ: &str = "Europe/Copenhagen";

pub const SECONDS_PER_WEEK: i64 = 7 * 86_400;

/// Index of the bin containing `t`: `floor((t - origin) / width)`.
pub fn bin_index(t: Timestamp, width_s: i64, origin_s: i64) -> Result<i64> {
    Ok(Binning::new(width_s, origin_s)?.index(t))
}

/// A fixed-width partition of the timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binning {
    width_s: i64,
    origin_s: i64,
}

impl Binning {
    pub fn new(width_s: i64, origin_s: i64) -> Result<Self> {
        if width_s <= 0 {
            return Err(Error::invalid(format!(
                "bin width must be positive, got {width_s}"
            )));
        }
        Ok(Binning { width_s, origin_s })
    }

    /// Bins of `width_s` seconds aligned to the Unix epoch.
    pub fn with_width(width_s: i64) -> Result<Self> {
        Binning::new(width_s, 0)
    }

    pub fn width_s(&self) -> i64 {
        self.width_s
    }

    pub fn origin_s(&self) -> i64 {
        self.origin_s
    }

    pub fn index(&self, t: Timestamp) -> i64 {
        (t.seconds() - self.origin_s).div_euclid(self.width_s)
    }

    pub fn bin(&self, t: Timestamp) -> TimeBin {
        self.at(self.index(t))
    }

    pub fn at(&self, index: i64) -> TimeBin {
        TimeBin {
            index,
            width_s: self.width_s,
            origin_s: self.origin_s,
        }
    }
}

impl Default for Binning {
    fn default() -> Self {
        Binning {
            width_s: DEFAULT_BIN_WIDTH_S,
            origin_s: 0,
        }
    }
}

/// One window `[start_s, end_s)` of a [`Binning`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeBin {
    pub index: i64,
    pub width_s: i64,
    pub origin_s: i64,
}

impl TimeBin {
    pub fn binning(&self) -> Binning {
        Binning {
            width_s: self.width_s,
            origin_s: self.origin_s,
        }
    }

    pub fn start_s(&self) -> i64 {
        self.origin_s + self.index * self.width_s
    }

    pub fn end_s(&self) -> i64 {
        self.start_s() + self.width_s
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        (self.start_s()..self.end_s()).contains(&t.seconds())
    }
}

pub fn parse_tz(name: &str) -> Result<Tz> {
    name.parse::<Tz>()
        .map_err(|_| Error::invalid(format!("unknown timezone `{name}`")))
}

/// Local `(day_of_week, hour)` of `t` in zone `tz`, Monday = 0.
pub fn weekly_bin(t: Timestamp, tz: &str) -> Result<(u8, u8)> {
    Ok(weekly_bin_in(t, &parse_tz(tz)?))
}

pub fn weekly_bin_in(t: Timestamp, tz: &Tz) -> (u8, u8) {
    let local = tz
        .timestamp_opt(t.seconds(), 0)
        .single()
        .expect("a UTC instant maps to exactly one local time");
    (
        local.weekday().num_days_from_monday() as u8,
        local.hour() as u8,
    )
}
