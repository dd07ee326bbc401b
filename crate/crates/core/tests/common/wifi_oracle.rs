//! Brute-force WiFi co-location recount, written against raw readings and
//! planted co-presence runs only.

use std::collections::{HashMap, HashSet};

use proxnet_core::ingest::WifiReading;
use proxnet_core::synth::GroundTruth;

/// Threshold rules expressed with integers so comparisons are exact.
#[derive(Debug, Clone, Copy)]
pub enum Rule {
    /// At least `k` shared APs.
    Count(usize),
    /// Shared / min size at least `num / den`.
    Coefficient { num: usize, den: usize },
    /// Mean absolute RSSI gap over shared APs at most `max_db`.
    Manhattan(i64),
    Strongest,
}

type Scan = HashMap<String, i32>;
/// `(bin, user_a, user_b)` with `user_a < user_b`.
pub type PairBin = (i64, String, String);

fn strongest(scan: &Scan) -> &str {
    let mut aps: Vec<(&String, &i32)> = scan.iter().collect();
    aps.sort_by(|x, y| y.1.cmp(x.1).then(x.0.cmp(y.0)));
    aps[0].0
}

fn passes(rule: Rule, x: &Scan, y: &Scan) -> bool {
    let shared: Vec<(i32, i32)> = x.iter().filter_map(|(ap, a)| y.get(ap).map(|b| (*a, *b))).collect();
    if shared.is_empty() {
        return false;
    }
    let n = shared.len();
    match rule {
        Rule::Count(k) => n >= k,
        Rule::Coefficient { num, den } => n * den >= num * x.len().min(y.len()),
        Rule::Manhattan(max_db) => {
            let gap: i64 = shared.iter().map(|(a, b)| i64::from((a - b).abs())).sum();
            gap <= max_db * n as i64
        }
        Rule::Strongest => strongest(x) == strongest(y),
    }
}

pub struct Oracle {
    /// Per bin, per user, the scans of that user.
    bins: HashMap<i64, HashMap<String, Vec<Scan>>>,
    reference: HashSet<PairBin>,
}

impl Oracle {
    pub fn new(readings: &[WifiReading], truth: &GroundTruth, width_s: i64) -> Self {
        let mut scans: HashMap<(String, i64), Scan> = HashMap::new();
        for r in readings {
            let rssi = scans
                .entry((r.user.as_str().to_string(), r.t.seconds()))
                .or_default()
                .entry(r.ap.clone())
                .or_insert(r.rssi);
            *rssi = (*rssi).max(r.rssi);
        }
        let mut bins: HashMap<i64, HashMap<String, Vec<Scan>>> = HashMap::new();
        for ((user, t), scan) in scans {
            bins.entry(t.div_euclid(width_s)).or_default().entry(user).or_default().push(scan);
        }
        let mut reference = HashSet::new();
        for run in &truth.copresence {
            for b in run.first_bin..=run.last_bin {
                let coarse = (b * truth.bin_width_s).div_euclid(width_s);
                let (a, c) = (run.user_a.as_str(), run.user_b.as_str());
                let (a, c) = if a < c { (a, c) } else { (c, a) };
                reference.insert((coarse, a.to_string(), c.to_string()));
            }
        }
        Oracle { bins, reference }
    }

    fn in_universe(&self, key: &PairBin) -> bool {
        self.bins
            .get(&key.0)
            .is_some_and(|users| users.contains_key(&key.1) && users.contains_key(&key.2))
    }

    pub fn predicted(&self, rule: Rule) -> HashSet<PairBin> {
        let mut out = HashSet::new();
        for (bin, users) in &self.bins {
            for (ua, sa) in users {
                for (ub, sb) in users {
                    if ua >= ub {
                        continue;
                    }
                    if sa.iter().any(|x| sb.iter().any(|y| passes(rule, x, y))) {
                        out.insert((*bin, ua.clone(), ub.clone()));
                    }
                }
            }
        }
        out
    }

    /// `(tp, fp, fn)` of `rule` against planted co-presence.
    pub fn confusion(&self, rule: Rule) -> (u64, u64, u64) {
        let predicted = self.predicted(rule);
        let reference: HashSet<&PairBin> = self.reference.iter().filter(|k| self.in_universe(k)).collect();
        let tp = predicted.iter().filter(|k| reference.contains(k)).count() as u64;
        let fp = predicted.len() as u64 - tp;
        (tp, fp, reference.len() as u64 - tp)
    }
}
