//! Directed transitions between merged stop locations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stops::StopLocation;
use crate::geo::{centroid, haversine, GeoPoint};
use crate::types::UserId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceCluster {
    pub id: usize,
    pub centroid: GeoPoint,
    pub stop_count: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransitionGraph {
    pub clusters: Vec<PlaceCluster>,
    /// `(from cluster, to cluster) -> count`; self-transitions included.
    pub edges: BTreeMap<(usize, usize), u64>,
}

impl TransitionGraph {
    pub fn total_transitions(&self) -> u64 {
        self.edges.values().sum()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Merge stop centroids by single linkage within `merge_radius_m`, then
/// count each user's consecutive stop pairs between clusters.
///
/// Cluster ids follow first appearance in (user, time) order.
pub fn transition_graph(stops: &BTreeMap<UserId, Vec<StopLocation>>, merge_radius_m: f64) -> TransitionGraph {
    let flat: Vec<&StopLocation> = stops.values().flatten().collect();
    let n = flat.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if haversine(flat[i].centroid, flat[j].centroid) <= merge_radius_m {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut root_to_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut label = vec![0usize; n];
    let mut members: Vec<Vec<GeoPoint>> = Vec::new();
    for (i, l) in label.iter_mut().enumerate() {
        let root = find(&mut parent, i);
        let id = *root_to_id.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        *l = id;
        members[id].push(flat[i].centroid);
    }
    let clusters = members
        .iter()
        .enumerate()
        .map(|(id, pts)| PlaceCluster {
            id,
            centroid: centroid(pts).expect("cluster has members"),
            stop_count: pts.len(),
        })
        .collect();
    let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut offset = 0;
    for user_stops in stops.values() {
        for k in 1..user_stops.len() {
            let key = (label[offset + k - 1], label[offset + k]);
            *edges.entry(key).or_default() += 1;
        }
        offset += user_stops.len();
    }
    TransitionGraph { clusters, edges }
}
