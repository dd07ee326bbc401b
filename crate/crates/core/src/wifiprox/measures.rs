//! Pairwise similarity between two WiFi scans.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::WifiReading;
use crate::types::{Timestamp, UserId};

/// Access points seen in one scan with their RSSI in dBm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WifiScan {
    pub user: UserId,
    pub t: Timestamp,
    pub readings: BTreeMap<String, i32>,
}

impl WifiScan {
    /// Build a scan, keeping the strongest RSSI for duplicate APs.
    pub fn new(user: UserId, t: Timestamp, readings: impl IntoIterator<Item = (String, i32)>) -> Self {
        let mut map: BTreeMap<String, i32> = BTreeMap::new();
        for (ap, rssi) in readings {
            map.entry(ap)
                .and_modify(|r| *r = (*r).max(rssi))
                .or_insert(rssi);
        }
        WifiScan {
            user,
            t,
            readings: map,
        }
    }

    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    /// Strongest AP; ties go to the lexicographically smallest id.
    pub fn strongest(&self) -> Option<&str> {
        // BTreeMap iterates ids ascending, so keeping the first maximum
        // implements the tie rule.
        let mut best: Option<(&str, i32)> = None;
        for (ap, &rssi) in &self.readings {
            if best.is_none_or(|(_, r)| rssi > r) {
                best = Some((ap, rssi));
            }
        }
        best.map(|(ap, _)| ap)
    }

    fn shared<'a>(&'a self, other: &'a WifiScan) -> impl Iterator<Item = (i32, i32)> + 'a {
        self.readings
            .iter()
            .filter_map(|(ap, &r)| other.readings.get(ap).map(|&o| (r, o)))
    }
}

/// Collapse readings into scans: consecutive readings sharing `(user, t)`
/// form one scan.
pub fn assemble_scans(readings: &[WifiReading]) -> Vec<WifiScan> {
    readings
        .chunk_by(|a, b| a.user == b.user && a.t == b.t)
        .map(|chunk| {
            WifiScan::new(
                chunk[0].user.clone(),
                chunk[0].t,
                chunk.iter().map(|r| (r.ap.clone(), r.rssi)),
            )
        })
        .collect()
}

/// `|X ∩ Y|`.
pub fn overlap_count(x: &WifiScan, y: &WifiScan) -> usize {
    x.shared(y).count()
}

/// `|X ∩ Y| / min(|X|, |Y|)`.
pub fn overlap_coefficient(x: &WifiScan, y: &WifiScan) -> Result<f64> {
    let denom = x.len().min(y.len());
    if denom == 0 {
        return Err(Error::invalid("overlap coefficient of an empty scan"));
    }
    Ok(overlap_count(x, y) as f64 / denom as f64)
}

/// Mean absolute RSSI difference (dB) over shared APs; `None` when the
/// scans share no AP.
pub fn mean_manhattan(x: &WifiScan, y: &WifiScan) -> Option<f64> {
    let (sum, n) = x
        .shared(y)
        .fold((0i64, 0usize), |(s, n), (a, b)| (s + i64::from((a - b).abs()), n + 1));
    (n > 0).then(|| sum as f64 / n as f64)
}

/// Whether both scans have the same strongest AP.
pub fn strongest_ap_match(x: &WifiScan, y: &WifiScan) -> Result<bool> {
    match (x.strongest(), y.strongest()) {
        (Some(a), Some(b)) => Ok(a == b),
        _ => Err(Error::invalid("strongest AP of an empty scan")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    OverlapCount,
    OverlapCoefficient,
    MeanManhattan,
    StrongestAp,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 4] = [
        MeasureKind::OverlapCount,
        MeasureKind::OverlapCoefficient,
        MeasureKind::MeanManhattan,
        MeasureKind::StrongestAp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::OverlapCount => "overlap_count",
            MeasureKind::OverlapCoefficient => "overlap_coefficient",
            MeasureKind::MeanManhattan => "mean_manhattan",
            MeasureKind::StrongestAp => "strongest_ap",
        }
    }

    /// Build the measure at `threshold`. The threshold of `strongest_ap`
    /// is ignored.
    pub fn with_threshold(self, threshold: f64) -> Result<SimilarityMeasure> {
        let m = match self {
            MeasureKind::OverlapCount => {
                if threshold < 1.0 || threshold.fract() != 0.0 || threshold > u32::MAX as f64 {
                    return Err(Error::invalid(format!(
                        "overlap count threshold must be an integer >= 1, got {threshold}"
                    )));
                }
                SimilarityMeasure::OverlapCount {
                    min_shared: threshold as usize,
                }
            }
            MeasureKind::OverlapCoefficient => SimilarityMeasure::OverlapCoefficient { min: threshold },
            MeasureKind::MeanManhattan => SimilarityMeasure::MeanManhattan { max_db: threshold },
            MeasureKind::StrongestAp => SimilarityMeasure::StrongestAp,
        };
        m.validate()?;
        Ok(m)
    }

    /// Threshold sweep used when none is given.
    pub fn default_thresholds(self) -> Vec<f64> {
        match self {
            MeasureKind::OverlapCount => (1..=10).map(f64::from).collect(),
            MeasureKind::OverlapCoefficient => (1..=10).map(|i| f64::from(i) / 10.0).collect(),
            MeasureKind::MeanManhattan => (0..=10).map(|i| f64::from(i) * 2.0).collect(),
            MeasureKind::StrongestAp => vec![1.0],
        }
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown similarity measure `{s}`")))
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A similarity measure together with its decision threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimilarityMeasure {
    /// At least `min_shared` common APs.
    OverlapCount { min_shared: usize },
    /// Overlap coefficient at least `min`.
    OverlapCoefficient { min: f64 },
    /// Mean RSSI difference over shared APs at most `max_db`.
    MeanManhattan { max_db: f64 },
    /// Same strongest AP.
    StrongestAp,
}

impl SimilarityMeasure {
    pub fn kind(&self) -> MeasureKind {
        match self {
            SimilarityMeasure::OverlapCount { .. } => MeasureKind::OverlapCount,
            SimilarityMeasure::OverlapCoefficient { .. } => MeasureKind::OverlapCoefficient,
            SimilarityMeasure::MeanManhattan { .. } => MeasureKind::MeanManhattan,
            SimilarityMeasure::StrongestAp => MeasureKind::StrongestAp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SimilarityMeasure::OverlapCount { min_shared } if min_shared < 1 => {
                Err(Error::invalid("overlap count threshold must be >= 1"))
            }
            SimilarityMeasure::OverlapCoefficient { min } if !(min > 0.0 && min <= 1.0) => Err(
                Error::invalid(format!("overlap coefficient threshold {min} outside (0, 1]")),
            ),
            SimilarityMeasure::MeanManhattan { max_db } if !(max_db >= 0.0 && max_db.is_finite()) => {
                Err(Error::invalid(format!(
                    "manhattan threshold {max_db} must be finite and >= 0"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether the scan pair counts as proximate. Every measure other than
    /// the overlap count also requires at least one shared AP.
    pub fn passes(&self, x: &WifiScan, y: &WifiScan) -> bool {
        if x.is_empty() || y.is_empty() {
            return false;
        }
        let shared = overlap_count(x, y);
        if shared == 0 {
            return false;
        }
        match *self {
            SimilarityMeasure::OverlapCount { min_shared } => shared >= min_shared,
            SimilarityMeasure::OverlapCoefficient { min } => {
                shared as f64 / x.len().min(y.len()) as f64 >= min
            }
            SimilarityMeasure::MeanManhattan { max_db } => {
                mean_manhattan(x, y).is_some_and(|d| d <= max_db)
            }
            SimilarityMeasure::StrongestAp => x.strongest() == y.strongest(),
        }
    }
}

/// Score of a scan pair under `kind`, oriented so that the pair passes a
/// threshold `th` iff `score >= th` (count, coefficient, strongest) or
/// `score <= th` (manhattan). `None` when the pair shares no AP.
pub(crate) fn pair_score(kind: MeasureKind, x: &WifiScan, y: &WifiScan) -> Option<f64> {
    if x.is_empty() || y.is_empty() {
        return None;
    }
    let shared = overlap_count(x, y);
    if shared == 0 {
        return None;
    }
    Some(match kind {
        MeasureKind::OverlapCount => shared as f64,
        MeasureKind::OverlapCoefficient => shared as f64 / x.len().min(y.len()) as f64,
        MeasureKind::MeanManhattan => mean_manhattan(x, y)?,
        MeasureKind::StrongestAp => {
            if x.strongest() == y.strongest() {
                1.0
            } else {
                0.0
            }
        }
    })
}
