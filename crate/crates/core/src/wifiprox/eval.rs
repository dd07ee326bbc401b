//! Scan binning, network inference and evaluation against a reference.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::measures::{assemble_scans, pair_score, MeasureKind, SimilarityMeasure, WifiScan};
use crate::btnet::BinnedNetwork;
use crate::error::{Error, Result};
use crate::ingest::WifiReading;
use crate::time::Binning;
use crate::types::{Edge, UserId};

/// Bin width for WiFi comparisons: the forced WiFi sampling period.
pub const WIFI_BIN_WIDTH_S: i64 = 600;

/// Scans grouped per bin and per user.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanBins {
    pub binning: Binning,
    pub bins: BTreeMap<i64, BTreeMap<UserId, Vec<WifiScan>>>,
}

impl ScanBins {
    pub fn scan_count(&self) -> usize {
        self.bins.values().flat_map(|u| u.values()).map(Vec::len).sum()
    }

    /// Users with at least one scan, per bin.
    pub fn universe(&self) -> BTreeMap<i64, BTreeSet<UserId>> {
        self.bins
            .iter()
            .map(|(b, users)| (*b, users.keys().cloned().collect()))
            .collect()
    }
}

/// Assemble readings into scans (by `(user, t)`) and bin them.
pub fn group_scans(readings: &[WifiReading], binning: Binning) -> ScanBins {
    let mut bins: BTreeMap<i64, BTreeMap<UserId, Vec<WifiScan>>> = BTreeMap::new();
    for scan in assemble_scans(readings) {
        bins.entry(binning.index(scan.t))
            .or_default()
            .entry(scan.user.clone())
            .or_default()
            .push(scan);
    }
    ScanBins { binning, bins }
}

/// Visit every user pair of every bin with that pair's scan lists.
fn for_each_pair<F: FnMut(i64, Edge, &[WifiScan], &[WifiScan])>(scans: &ScanBins, mut f: F) {
    for (bin, users) in &scans.bins {
        let users: Vec<(&UserId, &Vec<WifiScan>)> = users.iter().collect();
        for (i, (ui, si)) in users.iter().enumerate() {
            for (uj, sj) in &users[i + 1..] {
                if let Some(edge) = Edge::new((*ui).clone(), (*uj).clone()) {
                    f(*bin, edge, si, sj);
                }
            }
        }
    }
}

/// Edge `{i, j}` in a bin iff some scan of `i` and some scan of `j` in
/// that bin pass `measure`. Bins without edges are omitted.
pub fn infer_network(scans: &ScanBins, measure: &SimilarityMeasure) -> Result<Vec<BinnedNetwork>> {
    measure.validate()?;
    let mut edges: BTreeMap<i64, Vec<Edge>> = BTreeMap::new();
    for_each_pair(scans, |bin, edge, si, sj| {
        if si.iter().any(|x| sj.iter().any(|y| measure.passes(x, y))) {
            edges.entry(bin).or_default().push(edge);
        }
    });
    Ok(edges
        .into_iter()
        .map(|(bin, e)| BinnedNetwork::new(scans.binning.at(bin), e))
        .collect())
}

/// Best score of each user pair per bin under `kind`: the maximum for
/// count, coefficient and strongest AP, the minimum for manhattan.
/// Pairs without any shared AP are absent.
pub fn best_pair_scores(scans: &ScanBins, kind: MeasureKind) -> BTreeMap<(i64, Edge), f64> {
    let lower_is_better = kind == MeasureKind::MeanManhattan;
    let mut out = BTreeMap::new();
    for_each_pair(scans, |bin, edge, si, sj| {
        let best = si
            .iter()
            .flat_map(|x| sj.iter().filter_map(move |y| pair_score(kind, x, y)))
            .reduce(|a, b| if lower_is_better { a.min(b) } else { a.max(b) });
        if let Some(best) = best {
            out.insert((bin, edge), best);
        }
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    /// `TP / (TP + FP)`, absent without positive calls.
    pub fn ppv(&self) -> Option<f64> {
        let d = self.tp + self.fp;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    /// `TP / (TP + FN)`, absent without reference positives.
    pub fn recall(&self) -> Option<f64> {
        let d = self.tp + self.fn_;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }
}

type Universe = BTreeMap<i64, BTreeSet<UserId>>;

fn in_universe(universe: Option<&Universe>, bin: i64, e: &Edge) -> bool {
    universe.is_none_or(|u| u.get(&bin).is_some_and(|users| users.contains(e.a()) && users.contains(e.b())))
}

fn check_binning(a: &[BinnedNetwork], b: &[BinnedNetwork]) -> Result<()> {
    let mut widths = a.iter().chain(b).map(|n| n.bin.binning());
    if let Some(first) = widths.next() {
        if widths.any(|w| w != first) {
            return Err(Error::invalid("networks do not share a binning"));
        }
    }
    Ok(())
}

/// Compare predicted against reference bin networks. Pair-bins are counted
/// only inside `universe` (when given).
pub fn score_networks(
    predicted: &[BinnedNetwork],
    reference: &[BinnedNetwork],
    universe: Option<&Universe>,
) -> Result<Confusion> {
    check_binning(predicted, reference)?;
    let collect = |nets: &[BinnedNetwork]| -> BTreeSet<(i64, Edge)> {
        nets.iter()
            .flat_map(|n| n.edges().iter().map(move |e| (n.bin.index, e.clone())))
            .filter(|(b, e)| in_universe(universe, *b, e))
            .collect()
    };
    let (p, r) = (collect(predicted), collect(reference));
    let tp = p.intersection(&r).count() as u64;
    Ok(Confusion {
        tp,
        fp: p.len() as u64 - tp,
        fn_: r.len() as u64 - tp,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub threshold: f64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub ppv: Option<f64>,
    pub recall: Option<f64>,
}

impl EvalRow {
    fn new(threshold: f64, c: Confusion) -> Self {
        EvalRow {
            threshold,
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            ppv: c.ppv(),
            recall: c.recall(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub measure: MeasureKind,
    pub rows: Vec<EvalRow>,
}

/// Evaluate `kind` at each threshold against the reference networks.
///
/// The candidate universe is the set of pairs where both users have at
/// least one WiFi scan in the bin; reference edges outside it are ignored,
/// so recall reflects the method rather than WiFi data coverage.
pub fn evaluate(
    scans: &ScanBins,
    kind: MeasureKind,
    thresholds: &[f64],
    reference: &[BinnedNetwork],
) -> Result<EvalReport> {
    if let Some(r) = reference.first() {
        if r.bin.binning() != scans.binning {
            return Err(Error::invalid(format!(
                "reference binned at {} s, scans at {} s",
                r.bin.width_s,
                scans.binning.width_s()
            )));
        }
    }
    check_binning(reference, &[])?;
    let mut thresholds = thresholds.to_vec();
    thresholds.sort_by(f64::total_cmp);
    let measures = thresholds
        .iter()
        .map(|t| kind.with_threshold(*t))
        .collect::<Result<Vec<_>>>()?;

    let universe = scans.universe();
    let ref_edges: BTreeSet<(i64, Edge)> = reference
        .iter()
        .flat_map(|n| n.edges().iter().map(move |e| (n.bin.index, e.clone())))
        .filter(|(b, e)| in_universe(Some(&universe), *b, e))
        .collect();
    let scores = best_pair_scores(scans, kind);

    let rows = thresholds
        .iter()
        .zip(&measures)
        .map(|(&th, m)| {
            let mut c = Confusion::default();
            for (key, &score) in &scores {
                let positive = match m {
                    SimilarityMeasure::OverlapCount { min_shared } => score >= *min_shared as f64,
                    SimilarityMeasure::OverlapCoefficient { min } => score >= *min,
                    SimilarityMeasure::MeanManhattan { max_db } => score <= *max_db,
                    SimilarityMeasure::StrongestAp => score >= 1.0,
                };
                if positive {
                    if ref_edges.contains(key) {
                        c.tp += 1;
                    } else {
                        c.fp += 1;
                    }
                }
            }
            c.fn_ = ref_edges.len() as u64 - c.tp;
            EvalRow::new(th, c)
        })
        .collect();
    Ok(EvalReport { measure: kind, rows })
}

/// `measure,threshold,tp,fp,fn,ppv,recall`; undefined ratios are empty.
pub fn write_eval_csv<W: Write>(sink: W, reports: &[EvalReport]) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["measure", "threshold", "tp", "fp", "fn", "ppv", "recall"])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for rep in reports {
        for r in &rep.rows {
            w.write_record([
                rep.measure.name().to_string(),
                r.threshold.to_string(),
                r.tp.to_string(),
                r.fp.to_string(),
                r.fn_.to_string(),
                opt(r.ppv),
                opt(r.recall),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
