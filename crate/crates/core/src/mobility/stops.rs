//! Sequential stop-location extraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{haversine, GeoPoint};
use crate::ingest::LocationFix;
use crate::types::{Timestamp, UserId};

pub const DEFAULT_STOP_DISTANCE_M: f64 = 50.0;
pub const DEFAULT_STOP_DURATION_S: i64 = 600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopLocation {
    pub user: UserId,
    pub centroid: GeoPoint,
    pub start: Timestamp,
    pub end: Timestamp,
    pub member_count: usize,
}

impl StopLocation {
    pub fn duration_s(&self) -> i64 {
        self.end.seconds() - self.start.seconds()
    }
}

/// Running lat/lon mean of a candidate stop.
#[derive(Clone, Copy)]
struct Mean {
    lat: f64,
    lon: f64,
    n: usize,
}

impl Mean {
    fn of(p: GeoPoint) -> Self {
        Mean {
            lat: p.lat(),
            lon: p.lon(),
            n: 1,
        }
    }

    fn with(self, p: GeoPoint) -> Self {
        let n = self.n + 1;
        Mean {
            lat: self.lat + (p.lat() - self.lat) / n as f64,
            lon: self.lon + (p.lon() - self.lon) / n as f64,
            n,
        }
    }

    fn point(self) -> GeoPoint {
        GeoPoint::new(self.lat, self.lon).expect("mean of valid points is valid")
    }
}

/// Extract stops from one user's time-sorted fixes.
///
/// A candidate grows from consecutive fixes while the next fix lies within
/// `max_distance_m` of the running centroid and every member stays within
/// that distance of the updated centroid. A candidate spanning at least
/// `min_duration_s` is emitted and scanning resumes after it; otherwise
/// scanning resumes at the candidate's second fix.
pub fn extract_stops(fixes: &[LocationFix], max_distance_m: f64, min_duration_s: i64) -> Result<Vec<StopLocation>> {
    if !(max_distance_m > 0.0 && max_distance_m.is_finite()) {
        return Err(Error::invalid(format!("stop distance {max_distance_m} must be positive")));
    }
    if min_duration_s <= 0 {
        return Err(Error::invalid(format!("stop duration {min_duration_s} must be positive")));
    }
    if fixes.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::invalid("fixes must be time-sorted"));
    }
    let mut stops = Vec::new();
    let mut i = 0;
    while i < fixes.len() {
        let mut mean = Mean::of(fixes[i].point);
        let mut j = i + 1;
        while j < fixes.len() {
            let p = fixes[j].point;
            if haversine(p, mean.point()) > max_distance_m {
                break;
            }
            let next = mean.with(p);
            let c = next.point();
            if fixes[i..=j].iter().any(|f| haversine(f.point, c) > max_distance_m) {
                break;
            }
            mean = next;
            j += 1;
        }
        let (start, end) = (fixes[i].t, fixes[j - 1].t);
        if end.seconds() - start.seconds() >= min_duration_s {
            stops.push(StopLocation {
                user: fixes[i].user.clone(),
                centroid: mean.point(),
                start,
                end,
                member_count: j - i,
            });
            i = j;
        } else {
            i += 1;
        }
    }
    Ok(stops)
}
