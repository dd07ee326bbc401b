//! WiFi evaluation, mobility, communication and survey commands.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};

use serde::Serialize;

use proxnet_core::btnet::{build_networks, coarsen};
use proxnet_core::comms::{channel_similarity, contact_sets, summarize, weekly_profile, write_weekly, CommsSummary};
use proxnet_core::ingest::{ChannelKind, WifiReading};
use proxnet_core::mobility::{
    accuracy_cdf, by_user, extract_stops, filter_by_accuracy, hexbin, rg_kde, rg_per_user, transition_graph,
    write_cdf, write_density, write_hexbin, write_rg, write_stops, write_transitions, StopLocation,
};
use proxnet_core::surveys::{responses, score_big_five, trait_summary, ScoringKey, Trait, TraitStats};
use proxnet_core::synth::KEY_FILE;
use proxnet_core::wifiprox::{evaluate, group_scans, write_eval_csv, EvalReport, WIFI_BIN_WIDTH_S};
use proxnet_core::{Binning, Error, UserId};

use super::{data_file, load, Outcome};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::OutDir;

const SECONDS_PER_WEEK: i64 = 7 * 86_400;
const KDE_GRID_POINTS: usize = 200;
const KDE_PAD_BANDWIDTHS: f64 = 3.0;

fn outcome(command: &'static str, out: OutDir, notes: Vec<String>) -> Outcome {
    Outcome {
        command,
        out_dir: out.path().to_path_buf(),
        files: out.into_files(),
        notes,
    }
}

/// Each WiFi measure over its threshold sweep, scored against Bluetooth
/// proximity merged into the 600 s WiFi bins.
pub fn wifieval(cfg: &RunConfig) -> Result<Outcome> {
    if WIFI_BIN_WIDTH_S % cfg.bin_width_s != 0 {
        return Err(CliError::usage(format!(
            "--bin-width-s {} must divide the {WIFI_BIN_WIDTH_S} s WiFi bin",
            cfg.bin_width_s
        )));
    }
    let mut notes = Vec::new();
    let ds = load(cfg, &[ChannelKind::Bluetooth, ChannelKind::Wifi], &mut notes)?;
    let bt = build_networks(&ds.bluetooth, &ds.roster, Binning::with_width(cfg.bin_width_s)?, cfg.rssi_min);
    let wifi_binning = Binning::with_width(WIFI_BIN_WIDTH_S)?;
    let reference = coarsen(&bt, wifi_binning)?;
    let readings: Vec<WifiReading> = ds
        .wifi
        .iter()
        .filter(|r| ds.roster.is_participant(&r.user))
        .cloned()
        .collect();
    let scans = group_scans(&readings, wifi_binning);
    if scans.scan_count() == 0 {
        return Err(Error::EmptyInput("no WiFi scans from participants".into()).into());
    }
    let reports: Vec<EvalReport> = cfg
        .measures
        .iter()
        .map(|k| {
            let th = cfg.thresholds.clone().unwrap_or_else(|| k.default_thresholds());
            evaluate(&scans, *k, &th, &reference)
        })
        .collect::<proxnet_core::Result<_>>()?;

    let mut out = OutDir::create(&cfg.out)?;
    out.write("wifi_eval.csv", |w| write_eval_csv(w, &reports))?;
    out.json("wifi_eval.json", &reports)?;
    notes.push(format!(
        "{} scans, {} reference pair-bins",
        scans.scan_count(),
        reference.iter().map(|n| n.edges().len()).sum::<usize>()
    ));
    Ok(outcome("wifieval", out, notes))
}

#[derive(Serialize)]
struct KdeSummary {
    scale: &'static str,
    bandwidth: f64,
    /// `(bandwidth, mean leave-one-out log-likelihood)` per candidate.
    cv_scores: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct MobilitySummary {
    fixes: usize,
    fixes_within_accuracy: usize,
    accuracy_max_m: f64,
    users: usize,
    mean_rg_km: Option<f64>,
    rg_kde: Option<KdeSummary>,
    stop_d_m: f64,
    stop_t_s: i64,
    stops: usize,
    places: usize,
    transitions: u64,
    hex_cell_m: f64,
    hex_cells: usize,
}

/// Accuracy CDF on all fixes; everything else on fixes passing the
/// accuracy filter.
pub fn mobility(cfg: &RunConfig) -> Result<Outcome> {
    let mut notes = Vec::new();
    let ds = load(cfg, &[ChannelKind::Location], &mut notes)?;
    let cdf = accuracy_cdf(&ds.location)?;
    let fixes = filter_by_accuracy(&ds.location, cfg.accuracy_max_m);
    if fixes.is_empty() {
        return Err(Error::EmptyInput(format!("no fixes within {} m accuracy", cfg.accuracy_max_m)).into());
    }
    let rg = rg_per_user(&fixes)?;
    let rg_values: Vec<f64> = rg.values().copied().collect();
    let kde = match rg_kde(&rg_values, !cfg.rg_linear) {
        Ok(k) => Some(k),
        Err(Error::InsufficientData { needed, got }) => {
            notes.push(format!("r_g density skipped: {got} usable users, need {needed}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let stops: BTreeMap<UserId, Vec<StopLocation>> = by_user(&fixes)
        .into_iter()
        .map(|(u, f)| Ok((u, extract_stops(f, cfg.stop_d_m, cfg.stop_t_s)?)))
        .collect::<proxnet_core::Result<_>>()?;
    let flat: Vec<StopLocation> = stops.values().flatten().cloned().collect();
    let transitions = transition_graph(&stops, cfg.stop_d_m);
    let hex = hexbin(&fixes.iter().map(|f| f.point).collect::<Vec<_>>(), cfg.hex_cell_m)?;

    let mut out = OutDir::create(&cfg.out)?;
    out.write("accuracy_cdf.csv", |w| write_cdf(w, &cdf))?;
    out.write("rg.csv", |w| write_rg(w, &rg))?;
    if let Some(k) = &kde {
        let grid = k.kde.evaluate_grid(KDE_GRID_POINTS, KDE_PAD_BANDWIDTHS);
        out.write("rg_kde.csv", |w| write_density(w, &grid))?;
    }
    out.write("stops.csv", |w| write_stops(w, &flat))?;
    out.write("transitions.csv", |w| write_transitions(w, &transitions))?;
    out.write("hexbin.csv", |w| write_hexbin(w, &hex))?;
    out.json(
        "mobility_summary.json",
        &MobilitySummary {
            fixes: ds.location.len(),
            fixes_within_accuracy: fixes.len(),
            accuracy_max_m: cfg.accuracy_max_m,
            users: rg.len(),
            mean_rg_km: (!rg_values.is_empty()).then(|| rg_values.iter().sum::<f64>() / rg_values.len() as f64),
            rg_kde: kde.map(|k| KdeSummary {
                scale: if cfg.rg_linear { "linear" } else { "log10" },
                bandwidth: k.kde.bandwidth(),
                cv_scores: k.scores,
            }),
            stop_d_m: cfg.stop_d_m,
            stop_t_s: cfg.stop_t_s,
            stops: flat.len(),
            places: transitions.clusters.len(),
            transitions: transitions.total_transitions(),
            hex_cell_m: cfg.hex_cell_m,
            hex_cells: hex.counts.len(),
        },
    )?;
    notes.push(format!("{} users, {} stops", rg.len(), flat.len()));
    Ok(outcome("mobility", out, notes))
}

#[derive(Serialize)]
struct CommsReport {
    #[serde(flatten)]
    summary: CommsSummary,
    n_users: u64,
    n_weeks: u64,
    total_events: u64,
    weekly_peak_dow: usize,
    weekly_peak_hour: usize,
}

/// Call and SMS statistics, contact diversity and the weekly grid.
pub fn comms(cfg: &RunConfig) -> Result<Outcome> {
    let mut notes = Vec::new();
    let ds = load(cfg, &[ChannelKind::Comm], &mut notes)?;
    let (Some(first), Some(last)) = (
        ds.comm.iter().map(|e| e.t.seconds()).min(),
        ds.comm.iter().map(|e| e.t.seconds()).max(),
    ) else {
        return Err(Error::EmptyInput("no communication events".into()).into());
    };
    let n_users = ds.roster.participants().len() as u64;
    let n_weeks = cfg.weeks.unwrap_or((last - first) as u64 / SECONDS_PER_WEEK as u64 + 1);
    let weekly = weekly_profile(&ds.comm, &cfg.tz, n_users, n_weeks)?;
    let summary = summarize(&ds.comm, cfg.missed_as_incoming);
    let profiles = contact_sets(&ds.comm);
    let (peak_d, peak_h) = weekly.peak();

    let mut out = OutDir::create(&cfg.out)?;
    out.write("weekly.csv", |w| write_weekly(w, &weekly))?;
    out.write("contacts.csv", |w| {
        writeln!(w, "user_id,n_call,n_text,sigma")?;
        for (u, p) in &profiles {
            let sigma = channel_similarity(p).map(|s| s.to_string()).unwrap_or_default();
            writeln!(w, "{u},{},{},{sigma}", p.call_peers.len(), p.text_peers.len())?;
        }
        Ok(())
    })?;
    notes.push(format!("{} events over {n_weeks} week(s)", ds.comm.len()));
    out.json(
        "comms_summary.json",
        &CommsReport {
            summary,
            n_users,
            n_weeks,
            total_events: weekly.total(),
            weekly_peak_dow: peak_d,
            weekly_peak_hour: peak_h,
        },
    )?;
    Ok(outcome("comms", out, notes))
}

#[derive(Serialize)]
struct SurveyReport {
    users_scored: usize,
    min_items: usize,
    traits: BTreeMap<Trait, TraitStats>,
}

/// Per-user Big Five scores and cohort mean and spread.
pub fn survey(cfg: &RunConfig) -> Result<Outcome> {
    let mut notes = Vec::new();
    let ds = load(cfg, &[ChannelKind::Survey], &mut notes)?;
    let key_path = data_file(cfg, &cfg.key, KEY_FILE)?
        .ok_or_else(|| CliError::usage(format!("no scoring key: pass --key or add {KEY_FILE} to the data directory")))?;
    let f = File::open(&key_path).map_err(|e| Error::Io {
        path: key_path.clone(),
        source: e,
    })?;
    let key = ScoringKey::read(BufReader::new(f))?;
    let mut scores: BTreeMap<UserId, BTreeMap<Trait, f64>> = BTreeMap::new();
    for r in responses(&ds.survey)? {
        let s = score_big_five(&r, &key, cfg.min_items)?;
        if !s.is_empty() {
            scores.insert(r.user, s);
        }
    }
    let traits = trait_summary(&scores)?;

    let mut out = OutDir::create(&cfg.out)?;
    out.write("big_five_scores.csv", |w| {
        let header: Vec<&str> = Trait::ALL.iter().map(|t| t.code()).collect();
        writeln!(w, "user_id,{}", header.join(","))?;
        for (u, s) in &scores {
            let cells: Vec<String> = Trait::ALL
                .iter()
                .map(|t| s.get(t).map(|v| v.to_string()).unwrap_or_default())
                .collect();
            writeln!(w, "{u},{}", cells.join(","))?;
        }
        Ok(())
    })?;
    out.json(
        "big_five_summary.json",
        &SurveyReport {
            users_scored: scores.len(),
            min_items: cfg.min_items,
            traits,
        },
    )?;
    notes.push(format!("{} users scored", scores.len()));
    Ok(outcome("survey", out, notes))
}
