mod common;

use common::wifi_oracle::{Oracle, Rule};
use common::{commuters, load, synth_on_disk};
use proxnet_core::btnet::coarsen;
use proxnet_core::synth::{oracle_networks, RadioSpec, SynthConfig};
use proxnet_core::wifiprox::{evaluate, group_scans, MeasureKind, WIFI_BIN_WIDTH_S};
use proxnet_core::Binning;

fn sweep(kind: MeasureKind) -> Vec<(f64, Rule)> {
    let v: Vec<(f64, Rule)> = match kind {
        MeasureKind::OverlapCount => (1..=10).map(|k| (k as f64, Rule::Count(k))).collect(),
        MeasureKind::OverlapCoefficient => (1..=10)
            .map(|i| (i as f64 / 10.0, Rule::Coefficient { num: i, den: 10 }))
            .collect(),
        MeasureKind::MeanManhattan => (0..=10).map(|i| ((2 * i) as f64, Rule::Manhattan(2 * i))).collect(),
        MeasureKind::StrongestAp => vec![(1.0, Rule::Strongest)],
    };
    assert_eq!(v.iter().map(|x| x.0).collect::<Vec<_>>(), kind.default_thresholds());
    v
}

fn check_against_oracle(cfg: &SynthConfig) {
    let (dir, out) = synth_on_disk(cfg);
    let ds = load(dir.path());
    let binning = Binning::with_width(WIFI_BIN_WIDTH_S).unwrap();
    let scans = group_scans(&ds.wifi, binning);
    let reference = coarsen(&oracle_networks(&out.truth).unwrap(), binning).unwrap();
    let oracle = Oracle::new(&ds.wifi, &out.truth, WIFI_BIN_WIDTH_S);
    for kind in MeasureKind::ALL {
        let rules = sweep(kind);
        let thresholds: Vec<f64> = rules.iter().map(|r| r.0).collect();
        let report = evaluate(&scans, kind, &thresholds, &reference).unwrap();
        for (row, (th, rule)) in report.rows.iter().zip(&rules) {
            assert_eq!(row.threshold, *th);
            assert_eq!((row.tp, row.fp, row.fn_), oracle.confusion(*rule), "{kind} at {th}");
        }
    }
}

#[test]
fn evaluation_matches_brute_force_with_noise() {
    let cfg = SynthConfig {
        n_users: 12,
        n_days: 2,
        radio: RadioSpec {
            noise_sd_db: 4.0,
            ..Default::default()
        },
        ..Default::default()
    };
    check_against_oracle(&cfg);
}

#[test]
fn evaluation_matches_brute_force_without_noise() {
    check_against_oracle(&SynthConfig {
        n_users: 10,
        n_days: 3,
        seed: 9,
        ..Default::default()
    });
}

#[test]
fn zero_noise_recall_is_perfect_and_monotone() {
    let (dir, out) = synth_on_disk(&SynthConfig {
        n_users: 10,
        n_days: 2,
        ..Default::default()
    });
    let ds = load(dir.path());
    let binning = Binning::with_width(WIFI_BIN_WIDTH_S).unwrap();
    let scans = group_scans(&ds.wifi, binning);
    let reference = coarsen(&oracle_networks(&out.truth).unwrap(), binning).unwrap();
    assert!(!reference.is_empty());

    let recall = |kind: MeasureKind| -> Vec<f64> {
        evaluate(&scans, kind, &kind.default_thresholds(), &reference)
            .unwrap()
            .rows
            .iter()
            .map(|r| r.recall.unwrap())
            .collect()
    };
    assert_eq!(recall(MeasureKind::StrongestAp), vec![1.0]);
    let count = recall(MeasureKind::OverlapCount);
    assert_eq!(count[0], 1.0);
    let coefficient = recall(MeasureKind::OverlapCoefficient);
    for r in [&count, &coefficient] {
        assert!(r.windows(2).all(|w| w[1] <= w[0]), "{r:?}");
    }
    // Identical readings: every co-located pair has a zero RSSI gap.
    assert!(recall(MeasureKind::MeanManhattan).iter().all(|r| *r == 1.0));
}

#[test]
fn users_at_separate_homes_share_no_access_point() {
    // A weekend without venues: everyone stays home.
    let mut cfg = commuters(3, 2);
    cfg.start_date = "2013-10-12".into();
    let (dir, out) = synth_on_disk(&cfg);
    assert!(out.truth.copresence.is_empty());
    let ds = load(dir.path());
    let scans = group_scans(&ds.wifi, Binning::with_width(WIFI_BIN_WIDTH_S).unwrap());
    assert!(scans.scan_count() > 0);
    for kind in MeasureKind::ALL {
        let report = evaluate(&scans, kind, &kind.default_thresholds(), &[]).unwrap();
        assert!(report.rows.iter().all(|r| r.tp == 0 && r.fp == 0 && r.fn_ == 0));
    }
}

#[test]
fn scan_occupancy_matches_manifest() {
    let (dir, out) = synth_on_disk(&commuters(4, 1));
    let ds = load(dir.path());
    let scans = group_scans(&ds.wifi, Binning::with_width(WIFI_BIN_WIDTH_S).unwrap());
    let readings: usize = scans.bins.values().flat_map(|u| u.values()).flatten().map(|s| s.len()).sum();
    assert_eq!(readings, out.truth.manifest.records["wifi"]);
    // One scan per fix taken at a place; corridors have no coverage.
    let at_places: usize = out.truth.stops.values().flatten().map(|s| s.fixes).sum();
    assert_eq!(scans.scan_count(), at_places);
    assert!(at_places < out.truth.manifest.records["location"]);
}
