//! Bluetooth sightings to per-bin undirected proximity networks.
//!
//! Phones scan on their own clocks, so sightings are aggregated into
//! fixed-width bins. Within a bin an observation `i -> j` is recorded when
//! `i` saw a device owned by participant `j`; the bin network then contains
//! the undirected edge `{i, j}` if either direction was observed.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::csvio::csv_writer;
use crate::error::{Error, Result};
use crate::ingest::{BluetoothScan, Roster};
use crate::time::{Binning, TimeBin};
use crate::types::{Edge, Timestamp, UserId};

/// Directed participant observations, keyed by bin index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectedObservations {
    pub binning: Binning,
    pub bins: BTreeMap<i64, BTreeSet<(UserId, UserId)>>,
}

/// Undirected interaction graph of one time bin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinnedNetwork {
    pub bin: TimeBin,
    nodes: BTreeSet<UserId>,
    edges: BTreeSet<Edge>,
}

impl BinnedNetwork {
    pub fn new(bin: TimeBin, edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let nodes = edges
            .iter()
            .flat_map(|e| [e.a().clone(), e.b().clone()])
            .collect();
        BinnedNetwork { bin, nodes, edges }
    }

    pub fn empty(bin: TimeBin) -> Self {
        BinnedNetwork::new(bin, [])
    }

    /// Active participants: endpoints of at least one edge.
    pub fn nodes(&self) -> &BTreeSet<UserId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Both orientations of every edge.
    pub fn directed_pairs(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        self.edges.iter().flat_map(|e| {
            [
                (e.a().clone(), e.b().clone()),
                (e.b().clone(), e.a().clone()),
            ]
        })
    }
}

/// Edge weights over a window of bins `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WeightedNetwork {
    pub binning: Binning,
    pub window: (i64, i64),
    weights: BTreeMap<Edge, u64>,
}

impl WeightedNetwork {
    /// Zero weights are dropped.
    pub fn new(binning: Binning, window: (i64, i64), weights: impl IntoIterator<Item = (Edge, u64)>) -> Self {
        WeightedNetwork {
            binning,
            window,
            weights: weights.into_iter().filter(|(_, w)| *w > 0).collect(),
        }
    }

    pub fn weights(&self) -> &BTreeMap<Edge, u64> {
        &self.weights
    }

    pub fn weight(&self, e: &Edge) -> u64 {
        self.weights.get(e).copied().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn nodes(&self) -> BTreeSet<UserId> {
        self.weights
            .keys()
            .flat_map(|e| [e.a().clone(), e.b().clone()])
            .collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }
}

/// Per-bin directed observation sets.
///
/// Only sightings of devices owned by roster participants count; external
/// devices and self-sightings are skipped. With `rssi_min` set, scans
/// without a recorded RSSI fail the filter.
pub fn build_directed_observations(
    scans: &[BluetoothScan],
    roster: &Roster,
    binning: Binning,
    rssi_min: Option<i32>,
) -> DirectedObservations {
    let mut bins: BTreeMap<i64, BTreeSet<(UserId, UserId)>> = BTreeMap::new();
    for s in scans {
        if let Some(min) = rssi_min {
            if s.rssi.is_none_or(|r| r < min) {
                continue;
            }
        }
        if !roster.is_participant(&s.observer) {
            continue;
        }
        let Some(owner) = roster.owner_of(&s.seen) else {
            continue;
        };
        if owner == &s.observer {
            continue;
        }
        bins.entry(binning.index(s.t))
            .or_default()
            .insert((s.observer.clone(), owner.clone()));
    }
    DirectedObservations { binning, bins }
}

/// Undirected edge `{i, j}` for any observed `i -> j` or `j -> i`.
pub fn symmetrize_bin(bin: TimeBin, pairs: impl IntoIterator<Item = (UserId, UserId)>) -> BinnedNetwork {
    BinnedNetwork::new(bin, pairs.into_iter().filter_map(|(i, j)| Edge::new(i, j)))
}

/// One network per bin that holds at least one observation, in bin order.
pub fn symmetrize(obs: &DirectedObservations) -> Vec<BinnedNetwork> {
    obs.bins
        .iter()
        .map(|(idx, pairs)| symmetrize_bin(obs.binning.at(*idx), pairs.iter().cloned()))
        .filter(|n| !n.edges().is_empty())
        .collect()
}

/// Convenience: scans straight to per-bin networks.
pub fn build_networks(
    scans: &[BluetoothScan],
    roster: &Roster,
    binning: Binning,
    rssi_min: Option<i32>,
) -> Vec<BinnedNetwork> {
    symmetrize(&build_directed_observations(scans, roster, binning, rssi_min))
}

fn common_binning(bins: &[BinnedNetwork]) -> Result<Option<Binning>> {
    let mut it = bins.iter().map(|b| b.bin.binning());
    let Some(first) = it.next() else {
        return Ok(None);
    };
    if it.any(|b| b != first) {
        return Err(Error::invalid("networks use different binnings"));
    }
    Ok(Some(first))
}

/// Count, per edge, the bins in `[window.0, window.1)` where it is active.
pub fn aggregate(bins: &[BinnedNetwork], window: (i64, i64)) -> Result<WeightedNetwork> {
    let binning = common_binning(bins)?.unwrap_or_default();
    let mut weights: BTreeMap<Edge, u64> = BTreeMap::new();
    let mut seen_bins = BTreeSet::new();
    for net in bins {
        let idx = net.bin.index;
        if idx < window.0 || idx >= window.1 {
            continue;
        }
        if !seen_bins.insert(idx) {
            return Err(Error::invalid(format!("bin {idx} appears twice")));
        }
        for e in net.edges() {
            *weights.entry(e.clone()).or_default() += 1;
        }
    }
    Ok(WeightedNetwork::new(binning, window, weights))
}

/// Bin span `[first, last + 1)` covered by `bins`, if any.
pub fn span(bins: &[BinnedNetwork]) -> Option<(i64, i64)> {
    let lo = bins.iter().map(|b| b.bin.index).min()?;
    let hi = bins.iter().map(|b| b.bin.index).max()?;
    Some((lo, hi + 1))
}

/// Aggregate consecutive windows of `window_bins` bins covering `range`.
///
/// Windows are aligned to multiples of `window_bins` so that the same
/// partition is used regardless of where the data starts.
pub fn windowed_aggregates(
    bins: &[BinnedNetwork],
    range: (i64, i64),
    window_bins: i64,
) -> Result<Vec<WeightedNetwork>> {
    if window_bins <= 0 {
        return Err(Error::invalid("window size must be positive"));
    }
    common_binning(bins)?;
    let mut out = Vec::new();
    let mut start = range.0.div_euclid(window_bins) * window_bins;
    while start < range.1 {
        let end = start + window_bins;
        let net = aggregate(bins, (start, end))?;
        if net.edge_count() > 0 {
            out.push(net);
        }
        start = end;
    }
    Ok(out)
}

/// Union of the networks falling into each bin of a coarser `binning`.
/// Every input bin must lie inside a single target bin.
pub fn coarsen(bins: &[BinnedNetwork], binning: Binning) -> Result<Vec<BinnedNetwork>> {
    let mut out: BTreeMap<i64, BTreeSet<Edge>> = BTreeMap::new();
    for b in bins {
        let first = binning.index(Timestamp::new(b.bin.start_s().max(0))?);
        let last = binning.index(Timestamp::new((b.bin.end_s() - 1).max(0))?);
        if first != last {
            return Err(Error::invalid(format!(
                "bin starting at {} straddles the {} s target bins",
                b.bin.start_s(),
                binning.width_s()
            )));
        }
        out.entry(first).or_default().extend(b.edges().iter().cloned());
    }
    Ok(out
        .into_iter()
        .map(|(i, edges)| BinnedNetwork::new(binning.at(i), edges))
        .collect())
}

/// Networks for every bin in `range`, inserting empty ones where no
/// observation occurred.
pub fn dense_bins(bins: &[BinnedNetwork], binning: Binning, range: (i64, i64)) -> Vec<BinnedNetwork> {
    let by_idx: BTreeMap<i64, &BinnedNetwork> = bins.iter().map(|b| (b.bin.index, b)).collect();
    (range.0..range.1)
        .map(|i| {
            by_idx
                .get(&i)
                .map(|b| (*b).clone())
                .unwrap_or_else(|| BinnedNetwork::empty(binning.at(i)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinActivity {
    pub bin: i64,
    pub start_s: i64,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityStats {
    pub per_bin: Vec<BinActivity>,
    pub mean_nodes: f64,
    pub mean_edges: f64,
}

/// Active-participant and edge counts per bin, with means over the bins
/// given (pass [`dense_bins`] output to include silent bins).
pub fn bin_activity_stats(bins: &[BinnedNetwork]) -> ActivityStats {
    let per_bin: Vec<BinActivity> = bins
        .iter()
        .map(|b| BinActivity {
            bin: b.bin.index,
            start_s: b.bin.start_s(),
            nodes: b.nodes().len(),
            edges: b.edges().len(),
        })
        .collect();
    let n = per_bin.len();
    let mean = |f: fn(&BinActivity) -> usize| {
        if n == 0 {
            0.0
        } else {
            per_bin.iter().map(f).sum::<usize>() as f64 / n as f64
        }
    };
    ActivityStats {
        mean_nodes: mean(|a| a.nodes),
        mean_edges: mean(|a| a.edges),
        per_bin,
    }
}

/// `bin_start_s,user_a,user_b` rows.
pub fn write_binned_edges<W: Write>(sink: W, bins: &[BinnedNetwork]) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(["bin_start_s", "user_a", "user_b"])?;
    for b in bins {
        let start = b.bin.start_s().to_string();
        for e in b.edges() {
            w.write_record([start.as_str(), e.a().as_str(), e.b().as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `bin_start_s,user_a,user_b,weight` rows; `bin_start_s` is the window start.
pub fn write_weighted_edges<W: Write>(sink: W, nets: &[WeightedNetwork]) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(["bin_start_s", "user_a", "user_b", "weight"])?;
    for n in nets {
        let start = n.binning.at(n.window.0).start_s().to_string();
        for (e, wt) in n.weights() {
            w.write_record([start.as_str(), e.a().as_str(), e.b().as_str(), &wt.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_activity<W: Write>(sink: W, stats: &ActivityStats) -> Result<()> {
    let mut w = csv_writer(sink);
    w.write_record(["bin_start_s", "nodes", "edges"])?;
    for a in &stats.per_bin {
        w.write_record([a.start_s.to_string(), a.nodes.to_string(), a.edges.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Timestamp;
    use proptest::prelude::*;

    fn u(s: &str) -> UserId {
        UserId::new(s).unwrap()
    }

    fn e(a: &str, b: &str) -> Edge {
        Edge::new(u(a), u(b)).unwrap()
    }

    fn roster(n: usize) -> Roster {
        let mut r = Roster::new();
        for i in 0..n {
            r.add(u(&format!("u{i}")), Some(format!("d{i}"))).unwrap();
        }
        r
    }

    fn scan(obs: &str, t: i64, dev: &str) -> BluetoothScan {
        BluetoothScan {
            observer: u(obs),
            t: Timestamp::new(t).unwrap(),
            seen: dev.into(),
            rssi: Some(-70),
        }
    }

    fn five_min() -> Binning {
        Binning::with_width(300).unwrap()
    }

    #[test]
    fn single_scan_lands_in_bin_zero() {
        let obs = build_directed_observations(&[scan("u0", 10, "d1")], &roster(2), five_min(), None);
        assert_eq!(obs.bins.len(), 1);
        assert!(obs.bins[&0].contains(&(u("u0"), u("u1"))));
    }

    #[test]
    fn repeated_scans_collapse() {
        let scans = vec![scan("u0", 10, "d1"); 5];
        let obs = build_directed_observations(&scans, &roster(2), five_min(), None);
        assert_eq!(obs.bins[&0].len(), 1);
    }

    #[test]
    fn external_and_self_sightings_ignored() {
        let scans = [scan("u0", 10, "ext-1"), scan("u0", 10, "d0"), scan("x9", 10, "d0")];
        let obs = build_directed_observations(&scans, &roster(2), five_min(), None);
        assert!(obs.bins.is_empty());
    }

    #[test]
    fn rssi_filter() {
        let mut weak = scan("u0", 10, "d1");
        weak.rssi = Some(-95);
        let mut none = scan("u1", 10, "d0");
        none.rssi = None;
        let scans = [weak.clone(), none.clone()];
        assert_eq!(build_directed_observations(&scans, &roster(2), five_min(), None).bins[&0].len(), 2);
        assert!(build_directed_observations(&scans, &roster(2), five_min(), Some(-90)).bins.is_empty());
    }

    #[test]
    fn symmetrize_examples() {
        let b = five_min().at(0);
        let one = symmetrize_bin(b, [(u("i"), u("j"))]);
        assert_eq!(one.edges().iter().collect::<Vec<_>>(), [&e("i", "j")]);
        let both = symmetrize_bin(b, [(u("i"), u("j")), (u("j"), u("i"))]);
        assert_eq!(both, one);
        assert_eq!(symmetrize_bin(b, one.directed_pairs()), one);
    }

    #[test]
    fn aggregate_counts_active_bins() {
        let bins: Vec<_> = (0..10)
            .map(|i| {
                let edges = if i % 3 == 0 { vec![e("a", "b")] } else { vec![] };
                BinnedNetwork::new(five_min().at(i), edges)
            })
            .collect();
        let w = aggregate(&bins, (0, 10)).unwrap();
        assert_eq!(w.weight(&e("a", "b")), 4);
        let w = aggregate(&bins, (1, 10)).unwrap();
        assert_eq!(w.weight(&e("a", "b")), 3);
        assert_eq!(aggregate(&bins, (5, 5)).unwrap().edge_count(), 0);
        assert_eq!(aggregate(&[], (0, 100)).unwrap().edge_count(), 0);
    }

    #[test]
    fn aggregate_rejects_mixed_widths() {
        let a = BinnedNetwork::new(five_min().at(0), [e("a", "b")]);
        let b = BinnedNetwork::new(Binning::with_width(600).unwrap().at(1), [e("a", "b")]);
        assert!(matches!(aggregate(&[a, b], (0, 10)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn activity_examples() {
        let b = BinnedNetwork::new(five_min().at(0), [e("a", "b"), e("b", "c")]);
        let s = bin_activity_stats(&[b]);
        assert_eq!((s.per_bin[0].nodes, s.per_bin[0].edges), (3, 2));
        let empties = dense_bins(&[], five_min(), (0, 4));
        let s = bin_activity_stats(&empties);
        assert_eq!((s.mean_nodes, s.mean_edges), (0.0, 0.0));
        assert_eq!(s.per_bin.len(), 4);
    }

    #[test]
    fn windowed_aggregates_partition_weight() {
        let bins: Vec<_> = (0..12)
            .map(|i| BinnedNetwork::new(five_min().at(i), [e("a", "b")]))
            .collect();
        let ws = windowed_aggregates(&bins, (0, 12), 5).unwrap();
        assert_eq!(ws.iter().map(|w| w.weight(&e("a", "b"))).collect::<Vec<_>>(), [5, 5, 2]);
    }

    #[test]
    fn edge_list_export() {
        let b = BinnedNetwork::new(five_min().at(2), [e("b", "a")]);
        let mut out = Vec::new();
        write_binned_edges(&mut out, std::slice::from_ref(&b)).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "bin_start_s,user_a,user_b\n600,a,b\n");
        let w = aggregate(&[b], (2, 3)).unwrap();
        let mut out = Vec::new();
        write_weighted_edges(&mut out, &[w]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "bin_start_s,user_a,user_b,weight\n600,a,b,1\n");
    }

    fn arb_scans() -> impl Strategy<Value = Vec<BluetoothScan>> {
        proptest::collection::vec((0usize..10, 0i64..3000, 0usize..12), 0..=20).prop_map(|v| {
            v.into_iter()
                .map(|(o, t, d)| {
                    let dev = if d >= 10 { format!("ext{d}") } else { format!("d{d}") };
                    scan(&format!("u{o}"), t, &dev)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn aggregate_matches_brute_force_recount(scans in arb_scans(), lo in 0i64..5, len in 0i64..12) {
            let r = roster(10);
            let nets = build_networks(&scans, &r, five_min(), None);
            let window = (lo, lo + len);
            let agg = aggregate(&nets, window).unwrap();
            // Brute force: for each unordered participant pair and bin, ask
            // whether any scan witnessed it.
            let mut expected: BTreeMap<Edge, u64> = BTreeMap::new();
            for i in 0..10 {
                for j in (i + 1)..10 {
                    let (ui, uj) = (format!("u{i}"), format!("u{j}"));
                    let (di, dj) = (format!("d{i}"), format!("d{j}"));
                    for bin in window.0..window.1 {
                        let hit = scans.iter().any(|s| {
                            s.t.seconds() / 300 == bin
                                && ((s.observer.as_str() == ui && s.seen == dj)
                                    || (s.observer.as_str() == uj && s.seen == di))
                        });
                        if hit {
                            *expected.entry(e(&ui, &uj)).or_default() += 1;
                        }
                    }
                }
            }
            prop_assert_eq!(agg.weights(), &expected);
        }

        #[test]
        fn symmetrize_idempotent_and_canonical(scans in arb_scans()) {
            for net in build_networks(&scans, &roster(10), five_min(), None) {
                prop_assert!(net.edges().iter().all(|e| e.is_canonical()));
                prop_assert_eq!(&symmetrize_bin(net.bin, net.directed_pairs()), &net);
            }
        }

        #[test]
        fn enlarging_window_is_monotone(scans in arb_scans(), lo in 0i64..5, len in 0i64..6, grow in 0i64..6) {
            let nets = build_networks(&scans, &roster(10), five_min(), None);
            let small = aggregate(&nets, (lo, lo + len)).unwrap();
            let big = aggregate(&nets, (lo, lo + len + grow)).unwrap();
            prop_assert!(big.edge_count() >= small.edge_count());
            for (edge, w) in small.weights() {
                prop_assert!(big.weight(edge) >= *w);
            }
        }
    }

    #[test]
    fn coarsen_unions_sub_bins() {
        let fine = Binning::with_width(300).unwrap();
        let coarse = Binning::with_width(600).unwrap();
        let e = |a: &str, b: &str| Edge::new(UserId::new(a).unwrap(), UserId::new(b).unwrap()).unwrap();
        let bins = vec![
            BinnedNetwork::new(fine.at(4), [e("a", "b")]),
            BinnedNetwork::new(fine.at(5), [e("a", "b"), e("b", "c")]),
            BinnedNetwork::new(fine.at(7), [e("c", "d")]),
        ];
        let out = coarsen(&bins, coarse).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].bin, coarse.at(2));
        assert_eq!(out[0].edges().len(), 2);
        assert_eq!(out[1].edges().iter().cloned().collect::<Vec<_>>(), vec![e("c", "d")]);
        let odd = Binning::new(600, 100).unwrap();
        assert!(coarsen(&bins, odd).is_err());
    }
}
