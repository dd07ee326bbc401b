use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::btnet::BinnedNetwork;
use crate::error::Result;
use crate::time::Binning;
use crate::types::{Edge, UserId};

use super::config::SynthConfig;
use super::world::Place;

/// Consecutive bins `[first_bin, last_bin]` in which two users shared a place.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoPresenceRun {
    pub user_a: UserId,
    pub user_b: UserId,
    pub place: String,
    pub first_bin: i64,
    pub last_bin: i64,
}

impl CoPresenceRun {
    pub fn bins(&self) -> u64 {
        (self.last_bin - self.first_bin + 1) as u64
    }
}

/// A dwell: first and last location fix at one place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedStop {
    pub place: String,
    pub first_fix_s: i64,
    pub last_fix_s: i64,
    pub fixes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub config: SynthConfig,
    /// Records per channel file.
    pub records: BTreeMap<String, usize>,
    /// Records per channel and user (observer for Bluetooth).
    pub per_user: BTreeMap<String, BTreeMap<UserId, usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub bin_width_s: i64,
    pub places: Vec<Place>,
    pub communities: BTreeMap<UserId, usize>,
    pub social_ties: BTreeSet<Edge>,
    pub copresence: Vec<CoPresenceRun>,
    pub stops: BTreeMap<UserId, Vec<PlantedStop>>,
    /// Peer ids each user exchanged at least one call (or text) with.
    pub call_contacts: BTreeMap<UserId, BTreeSet<String>>,
    pub sms_contacts: BTreeMap<UserId, BTreeSet<String>>,
    /// Participant pairs with at least one call (or text) between them.
    pub call_ties: BTreeSet<Edge>,
    pub sms_ties: BTreeSet<Edge>,
    pub phone_ids: BTreeMap<UserId, String>,
    pub peak_hours: Vec<u32>,
    pub manifest: Manifest,
}

impl GroundTruth {
    pub fn binning(&self) -> Result<Binning> {
        Binning::with_width(self.bin_width_s)
    }

    /// Co-presence bin counts per pair.
    pub fn copresence_counts(&self) -> BTreeMap<Edge, u64> {
        let mut out = BTreeMap::new();
        for r in &self.copresence {
            if let Some(e) = Edge::new(r.user_a.clone(), r.user_b.clone()) {
                *out.entry(e).or_insert(0) += r.bins();
            }
        }
        out
    }
}

/// Exact planted co-presence networks, one per bin with at least one pair.
pub fn oracle_networks(gt: &GroundTruth) -> Result<Vec<BinnedNetwork>> {
    let binning = gt.binning()?;
    let mut per_bin: BTreeMap<i64, Vec<Edge>> = BTreeMap::new();
    for r in &gt.copresence {
        if let Some(e) = Edge::new(r.user_a.clone(), r.user_b.clone()) {
            for b in r.first_bin..=r.last_bin {
                per_bin.entry(b).or_default().push(e.clone());
            }
        }
    }
    Ok(per_bin
        .into_iter()
        .map(|(b, edges)| BinnedNetwork::new(binning.at(b), edges))
        .collect())
}

/// Merges per-bin `(bin, a, b, place)` observations into runs.
pub(crate) fn copresence_runs(mut obs: Vec<(i64, UserId, UserId, String)>) -> Vec<CoPresenceRun> {
    obs.sort_by(|x, y| (&x.1, &x.2, x.0).cmp(&(&y.1, &y.2, y.0)));
    let mut out: Vec<CoPresenceRun> = Vec::new();
    for (bin, a, b, place) in obs {
        if let Some(last) = out.last_mut() {
            if last.user_a == a && last.user_b == b && last.place == place && last.last_bin + 1 == bin {
                last.last_bin = bin;
                continue;
            }
        }
        out.push(CoPresenceRun {
            user_a: a,
            user_b: b,
            place,
            first_bin: bin,
            last_bin: bin,
        });
    }
    out.sort_by(|x, y| (x.first_bin, &x.user_a, &x.user_b).cmp(&(y.first_bin, &y.user_a, &y.user_b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> UserId {
        UserId::new(s).unwrap()
    }

    #[test]
    fn runs_merge_consecutive_bins() {
        let obs = vec![
            (3, u("a"), u("b"), "p".to_string()),
            (1, u("a"), u("b"), "p".to_string()),
            (2, u("a"), u("b"), "p".to_string()),
            (5, u("a"), u("b"), "p".to_string()),
            (6, u("a"), u("b"), "q".to_string()),
            (2, u("a"), u("c"), "p".to_string()),
        ];
        let runs = copresence_runs(obs);
        let spans: Vec<_> = runs.iter().map(|r| (r.user_b.as_str(), r.first_bin, r.last_bin)).collect();
        assert_eq!(spans, vec![("b", 1, 3), ("c", 2, 2), ("b", 5, 5), ("b", 6, 6)]);
    }
}
