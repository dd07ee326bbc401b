mod common;

use std::fs::File;

use common::{load, small, synth_on_disk};
use proxnet_core::comms::{contact_sets, participant_ties, summarize, weekly_profile, PhoneDirectory};
use proxnet_core::ingest::CommChannel;
use proxnet_core::synth::{CommSpec, SynthConfig, PHONES_FILE};

#[test]
fn contact_sets_equal_planted_contacts() {
    let (dir, out) = synth_on_disk(&small(12, 4));
    let ds = load(dir.path());
    let profiles = contact_sets(&ds.comm);
    for (user, peers) in &out.truth.call_contacts {
        assert_eq!(&profiles[user].call_peers, peers);
    }
    for (user, peers) in &out.truth.sms_contacts {
        assert_eq!(&profiles[user].text_peers, peers);
    }
    let with_calls = profiles.values().filter(|p| !p.call_peers.is_empty()).count();
    assert_eq!(with_calls, out.truth.call_contacts.len());
}

#[test]
fn participant_ties_equal_planted_ties() {
    let (dir, out) = synth_on_disk(&small(12, 4));
    let ds = load(dir.path());
    let phones = PhoneDirectory::read(File::open(dir.path().join(PHONES_FILE)).unwrap()).unwrap();
    assert_eq!(phones.len(), 12);
    assert_eq!(participant_ties(&ds.comm, CommChannel::Call, &phones), out.truth.call_ties);
    assert_eq!(participant_ties(&ds.comm, CommChannel::Sms, &phones), out.truth.sms_ties);
    assert!(out.truth.call_ties.iter().all(|e| out.truth.social_ties.contains(e)));
}

#[test]
fn sigma_matches_planted_sets() {
    let (dir, out) = synth_on_disk(&small(10, 3));
    let ds = load(dir.path());
    let s = summarize(&ds.comm, false);
    for (user, sigma) in &s.sigma {
        let empty = Default::default();
        let c = out.truth.call_contacts.get(user).unwrap_or(&empty);
        let t = out.truth.sms_contacts.get(user).unwrap_or(&empty);
        let inter = c.intersection(t).count() as f64;
        let union = c.union(t).count() as f64;
        assert_eq!(*sigma, inter / union);
    }
}

#[test]
fn weekly_peak_falls_in_planted_peak_hour() {
    let cfg = SynthConfig {
        n_users: 20,
        n_days: 14,
        comm: CommSpec {
            calls_per_day: 2.0,
            sms_per_day: 4.0,
            ..Default::default()
        },
        ..Default::default()
    };
    let (dir, out) = synth_on_disk(&cfg);
    let ds = load(dir.path());
    let p = weekly_profile(&ds.comm, &cfg.tz, 20, 2).unwrap();
    assert_eq!(p.total(), ds.comm.len() as u64);
    let (_, hour) = p.peak();
    assert!(out.truth.peak_hours.contains(&(hour as u32)), "peak at {hour}");
    let quiet: u64 = (0..7).map(|d| p.counts[d][3]).sum();
    assert_eq!(quiet, 0, "no activity outside active hours");
}
