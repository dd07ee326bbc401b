use serde::Serialize;

use proxnet_core::btnet::{
    bin_activity_stats, build_networks, dense_bins, span, windowed_aggregates, write_activity, write_binned_edges,
    write_weighted_edges,
};
use proxnet_core::ingest::ChannelKind;
use proxnet_core::netstats::{rescale, write_distribution, Distribution, Graph};
use proxnet_core::{Binning, Error};

use super::{load, Outcome};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::OutDir;

#[derive(Serialize)]
struct WindowSummary {
    window_s: i64,
    /// Windows with at least one edge.
    windows: usize,
    mean_degree: f64,
    mean_weight: f64,
}

#[derive(Serialize)]
struct BtnetSummary {
    bin_width_s: i64,
    first_bin_start_s: i64,
    bins: i64,
    active_bins: usize,
    distinct_edges: usize,
    mean_active_nodes: f64,
    mean_edges: f64,
    windows: Vec<WindowSummary>,
}

/// Per-bin networks, activity series and, per window size, the pooled
/// degree and edge-weight distributions before and after rescaling.
pub fn btnet(cfg: &RunConfig) -> Result<Outcome> {
    let mut notes = Vec::new();
    let ds = load(cfg, &[ChannelKind::Bluetooth], &mut notes)?;
    let binning = Binning::with_width(cfg.bin_width_s)?;
    let nets = build_networks(&ds.bluetooth, &ds.roster, binning, cfg.rssi_min);
    let range = span(&nets).ok_or_else(|| Error::EmptyInput("no participant sightings".into()))?;
    let activity = bin_activity_stats(&dense_bins(&nets, binning, range));
    let distinct: std::collections::BTreeSet<_> = nets.iter().flat_map(|n| n.edges().iter()).collect();

    let mut out = OutDir::create(&cfg.out)?;
    out.write("bt_edges.csv", |w| write_binned_edges(w, &nets))?;
    out.write("bt_activity.csv", |w| write_activity(w, &activity))?;

    let mut windows = Vec::new();
    for &window_s in &cfg.window_s {
        let aggs = windowed_aggregates(&nets, range, window_s / cfg.bin_width_s)?;
        let degrees = Distribution::from_counts(
            aggs.iter()
                .flat_map(|a| Graph::from(a).degrees().into_values().map(|d| d as u64).collect::<Vec<_>>()),
        );
        let weights = Distribution::from_counts(aggs.iter().flat_map(|a| a.weights().values().copied()));
        out.write(&format!("bt_weighted_w{window_s}.csv"), |w| write_weighted_edges(w, &aggs))?;
        for (name, d) in [("degree", &degrees), ("weight", &weights)] {
            out.write(&format!("bt_{name}_w{window_s}.csv"), |w| write_distribution(w, d))?;
            let r = rescale(d)?;
            out.write(&format!("bt_{name}_rescaled_w{window_s}.csv"), |w| write_distribution(w, &r))?;
        }
        windows.push(WindowSummary {
            window_s,
            windows: aggs.len(),
            mean_degree: degrees.mean()?,
            mean_weight: weights.mean()?,
        });
    }
    out.json(
        "btnet_summary.json",
        &BtnetSummary {
            bin_width_s: cfg.bin_width_s,
            first_bin_start_s: binning.at(range.0).start_s(),
            bins: range.1 - range.0,
            active_bins: nets.len(),
            distinct_edges: distinct.len(),
            mean_active_nodes: activity.mean_nodes,
            mean_edges: activity.mean_edges,
            windows,
        },
    )?;
    notes.push(format!("{} bins, {} distinct edges", nets.len(), distinct.len()));
    Ok(Outcome {
        command: "btnet",
        out_dir: out.path().to_path_buf(),
        files: out.into_files(),
        notes,
    })
}
