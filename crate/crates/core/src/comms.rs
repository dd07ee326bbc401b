//! Call and SMS statistics: durations, in/out ratios, contact-set
//! diversity and overlap, weekly activity profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{CommChannel, CommEvent, Direction};
use crate::time::{parse_tz, weekly_bin_in};
use crate::types::{Edge, UserId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    /// Mean over users of incoming/outgoing counts.
    pub mean_in_out_ratio: Option<f64>,
    pub users_in_ratio: usize,
    /// Users excluded because they have no outgoing events.
    pub users_without_outgoing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallStats {
    pub calls: usize,
    /// Calls with duration > 0; only these enter the duration statistics.
    pub connected_calls: usize,
    pub mean_duration_s: Option<f64>,
    pub median_duration_s: Option<f64>,
    pub ratio: RatioStats,
}

fn median(sorted: &[u32]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(f64::from(sorted[n / 2])),
        _ => Some((f64::from(sorted[n / 2 - 1]) + f64::from(sorted[n / 2])) / 2.0),
    }
}

/// Per-user incoming/outgoing ratio for `channel`, averaged over users with
/// at least one outgoing event. Missed calls count as incoming only with
/// `missed_as_incoming`.
pub fn in_out_ratio(events: &[CommEvent], channel: CommChannel, missed_as_incoming: bool) -> RatioStats {
    let mut per_user: BTreeMap<&UserId, (u64, u64)> = BTreeMap::new();
    for e in events.iter().filter(|e| e.channel == channel) {
        let entry = per_user.entry(&e.user).or_default();
        match e.direction {
            Direction::Incoming => entry.0 += 1,
            Direction::Missed if missed_as_incoming => entry.0 += 1,
            Direction::Missed => {}
            Direction::Outgoing => entry.1 += 1,
        }
    }
    let ratios: Vec<f64> = per_user
        .values()
        .filter(|(_, out)| *out > 0)
        .map(|(inc, out)| *inc as f64 / *out as f64)
        .collect();
    RatioStats {
        mean_in_out_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        users_in_ratio: ratios.len(),
        users_without_outgoing: per_user.len() - ratios.len(),
    }
}

/// Duration and ratio statistics over the call events in `events`.
pub fn call_stats(events: &[CommEvent], missed_as_incoming: bool) -> CallStats {
    let calls: Vec<&CommEvent> = events.iter().filter(|e| e.channel == CommChannel::Call).collect();
    let mut durations: Vec<u32> = calls
        .iter()
        .filter(|e| e.direction != Direction::Missed && e.duration_s > 0)
        .map(|e| e.duration_s)
        .collect();
    durations.sort_unstable();
    let mean = (!durations.is_empty())
        .then(|| durations.iter().map(|d| f64::from(*d)).sum::<f64>() / durations.len() as f64);
    CallStats {
        calls: calls.len(),
        connected_calls: durations.len(),
        mean_duration_s: mean,
        median_duration_s: median(&durations),
        ratio: in_out_ratio(events, CommChannel::Call, missed_as_incoming),
    }
}

/// Distinct peers a participant exchanged calls and texts with.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContactProfile {
    pub user: Option<UserId>,
    pub call_peers: BTreeSet<String>,
    pub text_peers: BTreeSet<String>,
}

/// Contact sets per user from both directions; missed calls count.
pub fn contact_sets(events: &[CommEvent]) -> BTreeMap<UserId, ContactProfile> {
    let mut out: BTreeMap<UserId, ContactProfile> = BTreeMap::new();
    for e in events {
        if e.peer == e.user.as_str() {
            continue;
        }
        let p = out.entry(e.user.clone()).or_insert_with(|| ContactProfile {
            user: Some(e.user.clone()),
            ..Default::default()
        });
        match e.channel {
            CommChannel::Call => p.call_peers.insert(e.peer.clone()),
            CommChannel::Sms => p.text_peers.insert(e.peer.clone()),
        };
    }
    out
}

/// Jaccard overlap of call and text contacts; absent when both are empty.
pub fn channel_similarity(profile: &ContactProfile) -> Option<f64> {
    let union = profile.call_peers.union(&profile.text_peers).count();
    if union == 0 {
        return None;
    }
    let inter = profile.call_peers.intersection(&profile.text_peers).count();
    Some(inter as f64 / union as f64)
}

/// Pearson correlation; absent with fewer than two points or zero variance.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    let n = pairs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson r between `|N_call|` and `|N_text|` across users.
pub fn diversity_correlation<'a>(profiles: impl IntoIterator<Item = &'a ContactProfile>) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = profiles
        .into_iter()
        .map(|p| (p.call_peers.len() as f64, p.text_peers.len() as f64))
        .collect();
    pearson(&pairs)
}

/// Event counts per local hour-of-week, normalised per user and week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyProfile {
    /// `counts[day][hour]`, Monday = 0.
    pub counts: [[u64; 24]; 7],
    pub n_users: u64,
    pub n_weeks: u64,
}

impl WeeklyProfile {
    pub fn denominator(&self) -> u64 {
        self.n_users * self.n_weeks
    }

    pub fn mean(&self, day: usize, hour: usize) -> f64 {
        self.counts[day][hour] as f64 / self.denominator() as f64
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn peak(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for d in 0..7 {
            for h in 0..24 {
                if self.counts[d][h] > self.counts[best.0][best.1] {
                    best = (d, h);
                }
            }
        }
        best
    }
}

pub fn weekly_profile(events: &[CommEvent], tz: &str, n_users: u64, n_weeks: u64) -> Result<WeeklyProfile> {
    let tz: Tz = parse_tz(tz)?;
    if n_users == 0 || n_weeks == 0 {
        return Err(Error::invalid("n_users and n_weeks must be >= 1"));
    }
    let mut counts = [[0u64; 24]; 7];
    for e in events {
        let (d, h) = weekly_bin_in(e.t, &tz);
        counts[d as usize][h as usize] += 1;
    }
    Ok(WeeklyProfile {
        counts,
        n_users,
        n_weeks,
    })
}

/// `dow,hour,mean_count`.
pub fn write_weekly<W: Write>(sink: W, profile: &WeeklyProfile) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["dow", "hour", "mean_count"])?;
    for d in 0..7 {
        for h in 0..24 {
            w.write_record([d.to_string(), h.to_string(), profile.mean(d, h).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Header of `phones.csv`.
pub const PHONE_HEADER: [&str; 2] = ["user_id", "peer_hash"];

/// Maps hashed phone ids back to participants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhoneDirectory {
    by_hash: BTreeMap<String, UserId>,
}

impl PhoneDirectory {
    /// Fails when one hash is claimed by two users.
    pub fn new(entries: impl IntoIterator<Item = (UserId, String)>) -> Result<Self> {
        let mut by_hash = BTreeMap::new();
        for (user, hash) in entries {
            if let Some(prev) = by_hash.insert(hash.clone(), user.clone()) {
                if prev != user {
                    return Err(Error::Validation(vec![format!(
                        "phone {hash} claimed by {prev} and {user}"
                    )]));
                }
            }
        }
        Ok(PhoneDirectory { by_hash })
    }

    pub fn owner(&self, hash: &str) -> Option<&UserId> {
        self.by_hash.get(hash)
    }

    pub fn len(&self) -> usize {
        self.by_hash.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_hash.is_empty()
    }

    pub fn read<R: std::io::Read>(stream: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(stream);
        if reader.headers()?.iter().ne(PHONE_HEADER) {
            return Err(Error::Format(format!("phones: expected header `{}`", PHONE_HEADER.join(","))));
        }
        let mut entries = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let row = row?;
            if row.len() != 2 || row[1].is_empty() {
                return Err(Error::Format(format!("phones row {}: expected user_id,peer_hash", i + 2)));
            }
            let user = UserId::new(&row[0]).map_err(|_| Error::Format(format!("phones row {}: empty user_id", i + 2)))?;
            entries.push((user, row[1].to_string()));
        }
        PhoneDirectory::new(entries)
    }

    pub fn write<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = crate::csvio::csv_writer(sink);
        w.write_record(PHONE_HEADER)?;
        let mut rows: Vec<(&UserId, &String)> = self.by_hash.iter().map(|(h, u)| (u, h)).collect();
        rows.sort();
        for (u, h) in rows {
            w.write_record([u.as_str(), h.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Participant pairs linked by at least one event on `channel`, seen from
/// either side. Peers outside the directory are dropped.
pub fn participant_ties(events: &[CommEvent], channel: CommChannel, phones: &PhoneDirectory) -> BTreeSet<Edge> {
    events
        .iter()
        .filter(|e| e.channel == channel)
        .filter_map(|e| phones.owner(&e.peer).and_then(|p| Edge::new(e.user.clone(), p.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommsSummary {
    pub calls: CallStats,
    pub sms_ratio: RatioStats,
    pub sms_count: usize,
    /// σ per user with a non-empty contact union.
    pub sigma: BTreeMap<UserId, f64>,
    pub mean_sigma: Option<f64>,
    pub diversity_correlation: Option<f64>,
}

pub fn summarize(events: &[CommEvent], missed_as_incoming: bool) -> CommsSummary {
    let profiles = contact_sets(events);
    let sigma: BTreeMap<UserId, f64> = profiles
        .iter()
        .filter_map(|(u, p)| channel_similarity(p).map(|s| (u.clone(), s)))
        .collect();
    let mean_sigma = (!sigma.is_empty()).then(|| sigma.values().sum::<f64>() / sigma.len() as f64);
    CommsSummary {
        calls: call_stats(events, missed_as_incoming),
        sms_ratio: in_out_ratio(events, CommChannel::Sms, false),
        sms_count: events.iter().filter(|e| e.channel == CommChannel::Sms).count(),
        sigma,
        mean_sigma,
        diversity_correlation: diversity_correlation(profiles.values()),
    }
}
