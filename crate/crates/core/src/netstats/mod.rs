//! Network-level statistics shared by all channels: degree and weight
//! distributions, Krings rescaling, summary metrics, weak-link thresholds
//! and edge-set comparison between channels.

mod distribution;
mod summary;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::btnet::{BinnedNetwork, WeightedNetwork};
use crate::error::{Error, Result};
use crate::types::{Edge, UserId};

pub use distribution::{degree_distribution, rescale, weight_distribution, write_distribution, Distribution};
pub use summary::{summarize, summarize_with, LowDegreeClustering, NetworkSummary};

/// Simple undirected graph; unlike the channel networks it may hold
/// isolated nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Graph {
    nodes: BTreeSet<UserId>,
    edges: BTreeSet<Edge>,
}

impl Graph {
    /// Edge endpoints are added to the node set.
    pub fn new(nodes: impl IntoIterator<Item = UserId>, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut nodes: BTreeSet<UserId> = nodes.into_iter().collect();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for e in &edges {
            nodes.insert(e.a().clone());
            nodes.insert(e.b().clone());
        }
        Graph { nodes, edges }
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        Graph::new([], edges)
    }

    pub fn nodes(&self) -> &BTreeSet<UserId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> BTreeMap<&UserId, usize> {
        let mut deg: BTreeMap<&UserId, usize> = self.nodes.iter().map(|n| (n, 0)).collect();
        for e in &self.edges {
            *deg.entry(e.a()).or_default() += 1;
            *deg.entry(e.b()).or_default() += 1;
        }
        deg
    }

    /// Sorted neighbour lists indexed by node rank.
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let index: BTreeMap<&UserId, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            let (a, b) = (index[e.a()], index[e.b()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }
}

impl From<&BinnedNetwork> for Graph {
    fn from(net: &BinnedNetwork) -> Self {
        Graph::new(net.nodes().iter().cloned(), net.edges().iter().cloned())
    }
}

impl From<&WeightedNetwork> for Graph {
    fn from(net: &WeightedNetwork) -> Self {
        Graph::from_edges(net.weights().keys().cloned())
    }
}

/// Drops edges with weight below `min_weight`; nodes left without edges go
/// with them.
pub fn threshold_weak_links(net: &WeightedNetwork, min_weight: u64) -> Result<WeightedNetwork> {
    if min_weight == 0 {
        return Err(Error::invalid("min_weight must be >= 1"));
    }
    Ok(WeightedNetwork::new(
        net.binning,
        net.window,
        net.weights()
            .iter()
            .filter(|(_, w)| **w >= min_weight)
            .map(|(e, w)| (e.clone(), *w)),
    ))
}

/// Largest `min_weight` whose surviving edges still carry at least `share`
/// of the total weight.
pub fn traffic_share_threshold(net: &WeightedNetwork, share: f64) -> Result<u64> {
    if !(share > 0.0 && share <= 1.0) {
        return Err(Error::invalid(format!("share must be in (0, 1], got {share}")));
    }
    let total = net.total_weight();
    if total == 0 {
        return Err(Error::EmptyInput("network has no weighted edges".into()));
    }
    let mut by_weight: BTreeMap<u64, u64> = BTreeMap::new();
    for w in net.weights().values() {
        *by_weight.entry(*w).or_default() += w;
    }
    let target = share * total as f64;
    let mut acc = 0u64;
    for (w, mass) in by_weight.iter().rev() {
        acc += mass;
        if acc as f64 >= target {
            return Ok(*w);
        }
    }
    Ok(*by_weight.keys().next().unwrap_or(&1))
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeDiff {
    pub only_a: BTreeSet<Edge>,
    pub only_b: BTreeSet<Edge>,
    pub shared: BTreeSet<Edge>,
}

impl EdgeDiff {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.only_a.len(), self.only_b.len(), self.shared.len())
    }
}

pub fn edge_set_diff(a: &BTreeSet<Edge>, b: &BTreeSet<Edge>) -> EdgeDiff {
    EdgeDiff {
        only_a: a.difference(b).cloned().collect(),
        only_b: b.difference(a).cloned().collect(),
        shared: a.intersection(b).cloned().collect(),
    }
}

/// `user_a,user_b,membership` rows with membership `a_only`, `b_only` or `shared`.
pub fn write_edge_diff<W: Write>(sink: W, diff: &EdgeDiff) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["user_a", "user_b", "membership"])?;
    let mut rows: Vec<(&Edge, &str)> = Vec::new();
    rows.extend(diff.only_a.iter().map(|e| (e, "a_only")));
    rows.extend(diff.only_b.iter().map(|e| (e, "b_only")));
    rows.extend(diff.shared.iter().map(|e| (e, "shared")));
    rows.sort();
    for (e, m) in rows {
        w.write_record([e.a().as_str(), e.b().as_str(), m])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Binning;
    use proptest::prelude::*;

    fn e(a: &str, b: &str) -> Edge {
        Edge::new(UserId::new(a).unwrap(), UserId::new(b).unwrap()).unwrap()
    }

    fn net(ws: &[(&str, &str, u64)]) -> WeightedNetwork {
        WeightedNetwork::new(Binning::default(), (0, 10), ws.iter().map(|(a, b, w)| (e(a, b), *w)))
    }

    #[test]
    fn weak_links() {
        let n = net(&[("a", "b", 100), ("b", "c", 200), ("c", "d", 300)]);
        let t = threshold_weak_links(&n, 147).unwrap();
        assert_eq!(t.edge_count(), 2);
        assert!(!t.nodes().contains(&UserId::new("a").unwrap()));
        assert_eq!(threshold_weak_links(&n, 1).unwrap(), n);
        assert_eq!(threshold_weak_links(&n, 301).unwrap().edge_count(), 0);
        assert!(threshold_weak_links(&n, 0).is_err());
    }

    #[test]
    fn traffic_share() {
        // total 600; 300 alone is 50%, 300+200 is 83%
        let n = net(&[("a", "b", 100), ("b", "c", 200), ("c", "d", 300)]);
        assert_eq!(traffic_share_threshold(&n, 0.8).unwrap(), 200);
        assert_eq!(traffic_share_threshold(&n, 0.5).unwrap(), 300);
        assert_eq!(traffic_share_threshold(&n, 1.0).unwrap(), 100);
        assert!(traffic_share_threshold(&n, 0.0).is_err());
        assert!(traffic_share_threshold(&net(&[]), 0.8).is_err());
    }

    #[test]
    fn diff_example() {
        let a = BTreeSet::from([e("1", "2"), e("2", "3")]);
        let b = BTreeSet::from([e("2", "3"), e("3", "4")]);
        let d = edge_set_diff(&a, &b);
        assert_eq!(d.only_a, BTreeSet::from([e("1", "2")]));
        assert_eq!(d.only_b, BTreeSet::from([e("3", "4")]));
        assert_eq!(d.shared, BTreeSet::from([e("2", "3")]));
        let same = edge_set_diff(&a, &a);
        assert!(same.only_a.is_empty() && same.only_b.is_empty());

        let mut buf = Vec::new();
        write_edge_diff(&mut buf, &d).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "user_a,user_b,membership\n1,2,a_only\n2,3,shared\n3,4,b_only\n"
        );
    }

    #[test]
    fn graph_conversions() {
        let g = Graph::from(&net(&[("a", "b", 3)]));
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        let g = Graph::new([UserId::new("z").unwrap()], [e("a", "b")]);
        assert_eq!(g.degrees()[&UserId::new("z").unwrap()], 0);
    }

    fn arb_edges() -> impl Strategy<Value = BTreeSet<Edge>> {
        proptest::collection::btree_set((0u8..8, 0u8..8), 0..20).prop_map(|s| {
            s.into_iter()
                .filter_map(|(a, b)| Edge::new(UserId::new(a.to_string()).unwrap(), UserId::new(b.to_string()).unwrap()))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn diff_partitions(a in arb_edges(), b in arb_edges()) {
            let d = edge_set_diff(&a, &b);
            let (x, y, z) = d.counts();
            prop_assert_eq!(x + y + z, a.union(&b).count());
            prop_assert!(d.only_a.is_disjoint(&d.shared) && d.only_b.is_disjoint(&d.shared));
        }

        #[test]
        fn threshold_monotone_idempotent(ws in proptest::collection::vec(1u64..100, 0..20), m1 in 1u64..100, m2 in 1u64..100) {
            let n = WeightedNetwork::new(
                Binning::default(),
                (0, 1),
                ws.iter().enumerate().map(|(i, w)| (e("hub", &format!("n{i}")), *w)),
            );
            let (lo, hi) = (m1.min(m2), m1.max(m2));
            let tl = threshold_weak_links(&n, lo).unwrap();
            let th = threshold_weak_links(&n, hi).unwrap();
            prop_assert!(th.weights().keys().all(|k| tl.weights().contains_key(k)));
            prop_assert_eq!(threshold_weak_links(&tl, lo).unwrap(), tl);
        }
    }
}
