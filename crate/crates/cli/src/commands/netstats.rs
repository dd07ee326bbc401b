use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;

use serde::Serialize;

use proxnet_core::btnet::{aggregate, build_networks, span};
use proxnet_core::comms::{participant_ties, PhoneDirectory};
use proxnet_core::ingest::{ChannelKind, CommChannel};
use proxnet_core::netstats::{
    degree_distribution, edge_set_diff, summarize, threshold_weak_links, traffic_share_threshold, write_distribution,
    write_edge_diff, Graph, NetworkSummary,
};
use proxnet_core::synth::PHONES_FILE;
use proxnet_core::{Binning, Error};

use super::{data_file, load, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::OutDir;

#[derive(Serialize)]
struct DiffCounts {
    only_bluetooth: usize,
    only_phone: usize,
    shared: usize,
}

#[derive(Serialize)]
struct NetstatsReport {
    bin_width_s: i64,
    min_weight: u64,
    traffic_share: Option<f64>,
    total_weight: u64,
    kept_weight: u64,
    /// `null` for networks without nodes.
    networks: BTreeMap<&'static str, Option<NetworkSummary>>,
    diffs: BTreeMap<&'static str, DiffCounts>,
}

/// Summaries of the aggregated Bluetooth network before and after removing
/// weak links, and of the call and SMS networks when a phone directory is
/// available, with the edge differences against face-to-face contact.
pub fn netstats(cfg: &RunConfig) -> Result<Outcome> {
    let mut notes = Vec::new();
    let dir = cfg.data_dir()?;
    let has_comm = dir.join(ChannelKind::Comm.file_name()).is_file();
    let kinds: &[ChannelKind] = if has_comm {
        &[ChannelKind::Bluetooth, ChannelKind::Comm]
    } else {
        &[ChannelKind::Bluetooth]
    };
    let ds = load(cfg, kinds, &mut notes)?;
    let nets = build_networks(&ds.bluetooth, &ds.roster, Binning::with_width(cfg.bin_width_s)?, cfg.rssi_min);
    let range = span(&nets).ok_or_else(|| Error::EmptyInput("no participant sightings".into()))?;
    let agg = aggregate(&nets, range)?;
    let min_weight = match (cfg.min_weight, cfg.traffic_share) {
        (Some(w), _) => w,
        (None, Some(share)) => traffic_share_threshold(&agg, share)?,
        (None, None) => 1,
    };
    let strong = threshold_weak_links(&agg, min_weight)?;

    let mut graphs: Vec<(&'static str, Graph)> = vec![
        ("bluetooth", Graph::from(&agg)),
        ("bluetooth_strong", Graph::from(&strong)),
    ];
    let mut diffs = Vec::new();
    let phones = match data_file(cfg, &cfg.phones, PHONES_FILE)? {
        Some(p) if has_comm => {
            let f = File::open(&p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            Some(PhoneDirectory::read(BufReader::new(f))?)
        }
        _ => {
            notes.push("no phone directory or comm file: phone networks skipped".into());
            None
        }
    };
    if let Some(phones) = &phones {
        let f2f = strong.weights().keys().cloned().collect();
        for (name, channel) in [("calls", CommChannel::Call), ("sms", CommChannel::Sms)] {
            let ties = participant_ties(&ds.comm, channel, phones);
            diffs.push((name, edge_set_diff(&f2f, &ties)));
            graphs.push((name, Graph::from_edges(ties)));
        }
    }

    let mut out = OutDir::create(&cfg.out)?;
    let mut networks = BTreeMap::new();
    for (name, g) in &graphs {
        let s = match summarize(g) {
            Ok(s) => Some(s),
            Err(Error::EmptyInput(_)) => None,
            Err(e) => return Err(e.into()),
        };
        networks.insert(*name, s);
        let d = degree_distribution(g, false);
        out.write(&format!("netstats_degree_{name}.csv"), |w| write_distribution(w, &d))?;
    }
    let mut diff_counts = BTreeMap::new();
    for (name, d) in &diffs {
        out.write(&format!("edge_diff_{name}.csv"), |w| write_edge_diff(w, d))?;
        let (only_bluetooth, only_phone, shared) = d.counts();
        diff_counts.insert(
            *name,
            DiffCounts {
                only_bluetooth,
                only_phone,
                shared,
            },
        );
    }
    out.json(
        "netstats_summary.json",
        &NetstatsReport {
            bin_width_s: cfg.bin_width_s,
            min_weight,
            traffic_share: cfg.traffic_share,
            total_weight: agg.total_weight(),
            kept_weight: strong.total_weight(),
            networks,
            diffs: diff_counts,
        },
    )?;
    notes.push(format!(
        "min weight {min_weight}: kept {} of {} edges",
        strong.edge_count(),
        agg.edge_count()
    ));
    Ok(Outcome {
        command: "netstats",
        out_dir: out.path().to_path_buf(),
        files: out.into_files(),
        notes,
    })
}
