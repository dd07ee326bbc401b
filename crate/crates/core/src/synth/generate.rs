use std::collections::{BTreeMap, BTreeSet};

use chrono::{Days, NaiveDate, NaiveTime, TimeZone};
use chrono_tz::Tz;
use rand::distributions::WeightedIndex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, LogNormal, Normal, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{
    deduplicate, BluetoothScan, CommChannel, CommEvent, CsvRecord, Direction, LocationFix, Roster, SurveyAnswer, WifiReading,
    RSSI_RANGE_DBM,
};
use crate::surveys::{KeyEntry, ScoringKey, Trait};
use crate::time::{parse_tz, weekly_bin_in, Binning};
use crate::types::{Edge, Timestamp, UserId};

use super::config::SynthConfig;
use super::truth::{copresence_runs, GroundTruth, Manifest, PlantedStop};
use super::world::World;

const SETUP_STREAM: u64 = 0;
const SURVEY_STREAM: u64 = 1;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generated channels plus the planted truth.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub roster: Roster,
    pub bluetooth: Vec<BluetoothScan>,
    pub wifi: Vec<WifiReading>,
    pub location: Vec<LocationFix>,
    pub comm: Vec<CommEvent>,
    pub survey: Vec<SurveyAnswer>,
    pub key: ScoringKey,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    At(usize),
    Transit,
}

/// Where a user is during local hour `h` of a day.
fn scheduled(cfg: &SynthConfig, weekday: bool, venue: Option<usize>, home: usize, class: usize, h: u32) -> State {
    let s = &cfg.schedule;
    if let Some(v) = venue {
        if h + 1 == s.venue_start_h || h == s.venue_end_h {
            return State::Transit;
        }
        if (s.venue_start_h..s.venue_end_h).contains(&h) {
            return State::At(v);
        }
    }
    if weekday {
        if h + 1 == s.class_start_h || h == s.class_end_h {
            return State::Transit;
        }
        if (s.class_start_h..s.class_end_h).contains(&h) {
            return State::At(class);
        }
    }
    State::At(home)
}

struct Tie {
    a: usize,
    b: usize,
    calls: bool,
    sms: bool,
}

struct ExternalContact {
    user: usize,
    phone: String,
    calls: bool,
    sms: bool,
}

struct Setup {
    users: Vec<UserId>,
    devices: Vec<String>,
    phones: Vec<String>,
    community: Vec<usize>,
    phase: Vec<i64>,
    ties: Vec<Tie>,
    externals: Vec<ExternalContact>,
}

fn channel_mix(rng: &mut ChaCha8Rng, p_call: f64, p_sms: f64) -> (bool, bool) {
    let calls = rng.gen_bool(p_call);
    let sms = rng.gen_bool(p_sms);
    if calls || sms {
        (calls, sms)
    } else if rng.gen_bool(0.5) {
        (true, false)
    } else {
        (false, true)
    }
}

fn phone_id(rng: &mut ChaCha8Rng, taken: &mut BTreeSet<String>) -> String {
    loop {
        let id = format!("{:016x}", rng.gen::<u64>());
        if taken.insert(id.clone()) {
            return id;
        }
    }
}

fn setup(cfg: &SynthConfig) -> Result<Setup> {
    let mut rng = rng_for(cfg.seed, SETUP_STREAM);
    let n = cfg.n_users;
    let width = (n - 1).to_string().len().max(3);
    let users: Vec<UserId> = (0..n).map(|i| UserId::new(format!("u{i:0width$}"))).collect::<Result<_>>()?;
    let devices = users.iter().map(|u| format!("bt-{u}")).collect();
    let mut taken = BTreeSet::new();
    let phones = (0..n).map(|_| phone_id(&mut rng, &mut taken)).collect();
    let community: Vec<usize> = (0..n).map(|i| i * cfg.social.communities / n).collect();
    let phase = (0..n).map(|_| rng.gen_range(0..cfg.bin_width_s)).collect();
    let mut ties = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = if community[a] == community[b] {
                cfg.social.p_intra
            } else {
                cfg.social.p_inter
            };
            if rng.gen_bool(p) {
                let (calls, sms) = channel_mix(&mut rng, cfg.comm.p_call_tie, cfg.comm.p_sms_tie);
                ties.push(Tie { a, b, calls, sms });
            }
        }
    }
    let mut externals = Vec::new();
    for user in 0..n {
        for _ in 0..cfg.comm.external_contacts {
            let (calls, sms) = channel_mix(&mut rng, cfg.comm.p_call_tie, cfg.comm.p_sms_tie);
            externals.push(ExternalContact {
                user,
                phone: phone_id(&mut rng, &mut taken),
                calls,
                sms,
            });
        }
    }
    Ok(Setup {
        users,
        devices,
        phones,
        community,
        phase,
        ties,
        externals,
    })
}

fn local_ts(tz: &Tz, date: NaiveDate, h: u32) -> Result<i64> {
    // Hours skipped by a DST change map to the next valid hour.
    for hh in h..h + 3 {
        let (d, hh) = if hh >= 24 {
            (date + Days::new(1), hh - 24)
        } else {
            (date, hh)
        };
        let naive = d.and_time(NaiveTime::from_hms_opt(hh, 0, 0).expect("valid hour"));
        if let Some(t) = tz.from_local_datetime(&naive).earliest() {
            return Ok(t.timestamp());
        }
    }
    Err(Error::invalid(format!("no valid local time near {date} {h}:00")))
}

#[derive(Default)]
struct DayOutput {
    bluetooth: Vec<BluetoothScan>,
    wifi: Vec<WifiReading>,
    location: Vec<LocationFix>,
    comm: Vec<CommEvent>,
    copresence: Vec<(i64, UserId, UserId, String)>,
    /// Per user: `(fix time, place)` for every fix, `None` in transit.
    trace: Vec<Vec<(i64, Option<usize>)>>,
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

fn clamp_rssi(v: f64) -> i32 {
    (v.round() as i32).clamp(*RSSI_RANGE_DBM.start(), *RSSI_RANGE_DBM.end())
}

fn simulate_day(cfg: &SynthConfig, world: &World, st: &Setup, tz: &Tz, day: u32) -> Result<DayOutput> {
    let mut rng = rng_for(cfg.seed, 2 + u64::from(day));
    let date = cfg.start()? + Days::new(u64::from(day));
    let day_start = local_ts(tz, date, 0)?;
    let day_end = local_ts(tz, date + Days::new(1), 0)?;
    let n = st.users.len();
    let binning = Binning::with_width(cfg.bin_width_s)?;
    let radio = &cfg.radio;
    let noise = (radio.noise_sd_db > 0.0)
        .then(|| Normal::new(0.0, radio.noise_sd_db))
        .transpose()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let pos_noise = (cfg.location.noise_m > 0.0)
        .then(|| Normal::new(0.0, cfg.location.noise_m))
        .transpose()
        .map_err(|e| Error::invalid(e.to_string()))?;

    let venue: Vec<Option<usize>> = (0..n)
        .map(|_| {
            rng.gen_bool(cfg.schedule.venue_prob)
                .then(|| world.venues[rng.gen_range(0..world.venues.len())])
        })
        .collect();

    let mut out = DayOutput {
        trace: vec![Vec::new(); n],
        ..Default::default()
    };
    let mut transit_step = vec![0usize; n];
    let mut t0 = day_start;
    while t0 < day_end {
        let (dow, h) = weekly_bin_in(Timestamp::new(t0)?, tz);
        let weekday = dow < 5;
        let states: Vec<State> = (0..n)
            .map(|u| {
                scheduled(
                    cfg,
                    weekday,
                    venue[u],
                    world.homes[u],
                    world.classrooms[st.community[u]],
                    u32::from(h),
                )
            })
            .collect();
        let pos: Vec<(f64, f64)> = (0..n)
            .map(|u| match states[u] {
                State::At(p) => {
                    transit_step[u] = 0;
                    (world.places[p].x, world.places[p].y)
                }
                State::Transit => {
                    let xy = world.corridor(u, transit_step[u]);
                    transit_step[u] += 1;
                    xy
                }
            })
            .collect();
        let bin = binning.index(Timestamp::new(t0)?);

        for u in 0..n {
            let t = Timestamp::new(t0 + st.phase[u])?;
            let user = &st.users[u];
            let (mut x, mut y) = pos[u];
            if let Some(nd) = &pos_noise {
                x += nd.sample(&mut rng);
                y += nd.sample(&mut rng);
            }
            let loc = &cfg.location;
            let accuracy_m = if rng.gen_bool(loc.coarse_prob) {
                loc.coarse_accuracy_m
            } else {
                (rng.gen_range(loc.accuracy_min_m..=loc.accuracy_max_m) * 10.0).round() / 10.0
            };
            out.location.push(LocationFix {
                user: user.clone(),
                t,
                point: world.to_geo(x, y)?,
                accuracy_m,
            });
            out.trace[u].push((t.seconds(), match states[u] {
                State::At(p) => Some(p),
                State::Transit => None,
            }));

            let (px, py) = pos[u];
            for ap in &world.aps {
                let mut rssi = radio.expected_rssi((ap.x - px).hypot(ap.y - py));
                if let Some(nd) = &noise {
                    rssi += nd.sample(&mut rng);
                }
                if rssi >= radio.floor_dbm {
                    out.wifi.push(WifiReading {
                        user: user.clone(),
                        t,
                        ap: ap.id.clone(),
                        rssi: clamp_rssi(rssi),
                    });
                }
            }

            for v in 0..n {
                if v == u {
                    continue;
                }
                let d = (pos[v].0 - px).hypot(pos[v].1 - py);
                if d <= radio.bt_range_m && rng.gen_bool(radio.bt_detect_prob) {
                    let mut rssi = radio.expected_rssi(d);
                    if let Some(nd) = &noise {
                        rssi += nd.sample(&mut rng);
                    }
                    out.bluetooth.push(BluetoothScan {
                        observer: user.clone(),
                        t,
                        seen: st.devices[v].clone(),
                        rssi: Some(clamp_rssi(rssi)),
                    });
                }
            }
            for _ in 0..poisson(&mut rng, radio.external_rate) {
                let k = rng.gen_range(0..radio.external_pool);
                let rssi = rng.gen_range(-100..=-60);
                out.bluetooth.push(BluetoothScan {
                    observer: user.clone(),
                    t,
                    seen: format!("ext-{k:04}"),
                    rssi: Some(rssi),
                });
            }
        }

        for u in 0..n {
            if let State::At(p) = states[u] {
                for v in u + 1..n {
                    if states[v] == State::At(p) {
                        out.copresence
                            .push((bin, st.users[u].clone(), st.users[v].clone(), world.places[p].id.clone()));
                    }
                }
            }
        }
        t0 += cfg.bin_width_s;
    }

    simulate_comms(cfg, st, tz, date, &mut rng, &mut out.comm)?;
    Ok(out)
}

fn simulate_comms(
    cfg: &SynthConfig,
    st: &Setup,
    tz: &Tz,
    date: NaiveDate,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<CommEvent>,
) -> Result<()> {
    let c = &cfg.comm;
    let weights: Vec<f64> = c
        .active_hours
        .iter()
        .map(|h| if c.peak_hours.contains(h) { c.peak_weight } else { 1.0 })
        .collect();
    let hours = WeightedIndex::new(&weights).map_err(|e| Error::invalid(e.to_string()))?;
    let dur = LogNormal::new(c.duration_mu, c.duration_sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let when = |rng: &mut ChaCha8Rng| -> Result<Timestamp> {
        let h = c.active_hours[hours.sample(rng)];
        Timestamp::new(local_ts(tz, date, h)? + rng.gen_range(0..3600))
    };
    let event = |user: &UserId, t, peer: &str, channel, direction, duration_s| CommEvent {
        user: user.clone(),
        t,
        peer: peer.to_string(),
        channel,
        direction,
        duration_s,
    };

    for tie in &st.ties {
        let (a, b) = (&st.users[tie.a], &st.users[tie.b]);
        let (pa, pb) = (&st.phones[tie.a], &st.phones[tie.b]);
        if tie.calls {
            for _ in 0..poisson(rng, c.calls_per_day) {
                let t = when(rng)?;
                let (caller, callee, p_caller, p_callee) = if rng.gen_bool(0.5) { (a, b, pa, pb) } else { (b, a, pb, pa) };
                if rng.gen_bool(c.missed_prob) {
                    out.push(event(caller, t, p_callee, CommChannel::Call, Direction::Outgoing, 0));
                    out.push(event(callee, t, p_caller, CommChannel::Call, Direction::Missed, 0));
                } else {
                    let d = (dur.sample(rng).round() as u32).max(1);
                    out.push(event(caller, t, p_callee, CommChannel::Call, Direction::Outgoing, d));
                    out.push(event(callee, t, p_caller, CommChannel::Call, Direction::Incoming, d));
                }
            }
        }
        if tie.sms {
            for _ in 0..poisson(rng, c.sms_per_day) {
                let t = when(rng)?;
                let (from, to, p_from, p_to) = if rng.gen_bool(0.5) { (a, b, pa, pb) } else { (b, a, pb, pa) };
                out.push(event(from, t, p_to, CommChannel::Sms, Direction::Outgoing, 0));
                out.push(event(to, t, p_from, CommChannel::Sms, Direction::Incoming, 0));
            }
        }
    }
    for ext in &st.externals {
        let user = &st.users[ext.user];
        if ext.calls {
            for _ in 0..poisson(rng, c.calls_per_day) {
                let t = when(rng)?;
                let ev = match (rng.gen_bool(0.5), rng.gen_bool(c.missed_prob)) {
                    (true, _) => {
                        let d = (dur.sample(rng).round() as u32).max(1);
                        event(user, t, &ext.phone, CommChannel::Call, Direction::Outgoing, d)
                    }
                    (false, true) => event(user, t, &ext.phone, CommChannel::Call, Direction::Missed, 0),
                    (false, false) => {
                        let d = (dur.sample(rng).round() as u32).max(1);
                        event(user, t, &ext.phone, CommChannel::Call, Direction::Incoming, d)
                    }
                };
                out.push(ev);
            }
        }
        if ext.sms {
            for _ in 0..poisson(rng, c.sms_per_day) {
                let t = when(rng)?;
                let dir = if rng.gen_bool(0.5) { Direction::Outgoing } else { Direction::Incoming };
                out.push(event(user, t, &ext.phone, CommChannel::Sms, dir, 0));
            }
        }
    }
    Ok(())
}

fn survey(cfg: &SynthConfig, users: &[UserId]) -> Result<(ScoringKey, Vec<SurveyAnswer>)> {
    let mut rng = rng_for(cfg.seed, SURVEY_STREAM);
    let n_items = cfg.survey.items_per_trait * Trait::ALL.len();
    let width = n_items.to_string().len().max(2);
    let items: Vec<(String, KeyEntry)> = (0..n_items)
        .map(|k| {
            (
                format!("bfi{:0width$}", k + 1),
                KeyEntry {
                    trait_: Trait::ALL[k % Trait::ALL.len()],
                    reversed: (k / Trait::ALL.len()) % 2 == 1,
                },
            )
        })
        .collect();
    let latent = Normal::<f64>::new(3.3, 0.6).map_err(|e| Error::invalid(e.to_string()))?;
    let noise = Normal::<f64>::new(0.0, cfg.survey.answer_noise_sd.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::invalid(e.to_string()))?;
    let mut answers = Vec::new();
    for user in users {
        let level: Vec<f64> = Trait::ALL.iter().map(|_| latent.sample(&mut rng).clamp(1.0, 5.0)).collect();
        for (k, (item, entry)) in items.iter().enumerate() {
            let raw = (level[k % Trait::ALL.len()] + noise.sample(&mut rng)).round().clamp(1.0, 5.0) as u8;
            answers.push(SurveyAnswer {
                user: user.clone(),
                item: item.clone(),
                score: if entry.reversed { 6 - raw } else { raw },
            });
        }
    }
    Ok((ScoringKey::new(items)?, answers))
}

fn planted_stops(trace: &[(i64, Option<usize>)], world: &World) -> Vec<PlantedStop> {
    trace
        .chunk_by(|x, y| x.1 == y.1)
        .filter_map(|run| {
            let place = run[0].1?;
            Some(PlantedStop {
                place: world.places[place].id.clone(),
                first_fix_s: run[0].0,
                last_fix_s: run[run.len() - 1].0,
                fixes: run.len(),
            })
        })
        .collect()
}

fn per_user<T: CsvRecord>(records: &[T]) -> BTreeMap<UserId, usize> {
    let mut m = BTreeMap::new();
    for r in records {
        *m.entry(r.user().clone()).or_insert(0) += 1;
    }
    m
}

/// Runs the simulation. Days are simulated in parallel, each from its own
/// random stream, so the output depends only on the configuration.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let tz = parse_tz(&cfg.tz)?;
    let world = World::build(cfg)?;
    let st = setup(cfg)?;
    let days: Vec<DayOutput> = (0..cfg.n_days)
        .into_par_iter()
        .map(|d| simulate_day(cfg, &world, &st, &tz, d))
        .collect::<Result<_>>()?;

    let n = st.users.len();
    let mut bluetooth = Vec::new();
    let mut wifi = Vec::new();
    let mut location = Vec::new();
    let mut comm = Vec::new();
    let mut copresence = Vec::new();
    let mut trace: Vec<Vec<(i64, Option<usize>)>> = vec![Vec::new(); n];
    for day in days {
        bluetooth.extend(day.bluetooth);
        wifi.extend(day.wifi);
        location.extend(day.location);
        comm.extend(day.comm);
        copresence.extend(day.copresence);
        for (u, tr) in day.trace.into_iter().enumerate() {
            trace[u].extend(tr);
        }
    }
    comm.sort_by(|x, y| (x.t, &x.user).cmp(&(y.t, &y.user)));
    // Rare exact repeats (same second, same peer) would be collapsed on
    // load; drop them here so the manifest matches what ingest keeps.
    let bluetooth = deduplicate(bluetooth);
    let comm = deduplicate(comm);

    let mut roster = Roster::new();
    for (u, dev) in st.users.iter().zip(&st.devices) {
        roster.add(u.clone(), Some(dev.clone()))?;
    }
    let (key, survey) = survey(cfg, &st.users)?;

    let phone_owner: BTreeMap<&str, &UserId> = st.phones.iter().map(|p| p.as_str()).zip(&st.users).collect();
    let mut call_contacts: BTreeMap<UserId, BTreeSet<String>> = BTreeMap::new();
    let mut sms_contacts: BTreeMap<UserId, BTreeSet<String>> = BTreeMap::new();
    let mut call_ties = BTreeSet::new();
    let mut sms_ties = BTreeSet::new();
    for e in &comm {
        let (contacts, ties) = match e.channel {
            CommChannel::Call => (&mut call_contacts, &mut call_ties),
            CommChannel::Sms => (&mut sms_contacts, &mut sms_ties),
        };
        contacts.entry(e.user.clone()).or_default().insert(e.peer.clone());
        if let Some(owner) = phone_owner.get(e.peer.as_str()) {
            ties.extend(Edge::new(e.user.clone(), (*owner).clone()));
        }
    }

    let records = BTreeMap::from([
        ("bluetooth".to_string(), bluetooth.len()),
        ("wifi".to_string(), wifi.len()),
        ("location".to_string(), location.len()),
        ("comm".to_string(), comm.len()),
        ("survey".to_string(), survey.len()),
    ]);
    let per_user_counts = BTreeMap::from([
        ("bluetooth".to_string(), per_user(&bluetooth)),
        ("wifi".to_string(), per_user(&wifi)),
        ("location".to_string(), per_user(&location)),
        ("comm".to_string(), per_user(&comm)),
        ("survey".to_string(), per_user(&survey)),
    ]);

    let truth = GroundTruth {
        bin_width_s: cfg.bin_width_s,
        places: world.places.clone(),
        communities: st.users.iter().cloned().zip(st.community.iter().copied()).collect(),
        social_ties: st
            .ties
            .iter()
            .filter_map(|t| Edge::new(st.users[t.a].clone(), st.users[t.b].clone()))
            .collect(),
        copresence: copresence_runs(copresence),
        stops: st
            .users
            .iter()
            .zip(&trace)
            .map(|(u, tr)| (u.clone(), planted_stops(tr, &world)))
            .collect(),
        call_contacts,
        sms_contacts,
        call_ties,
        sms_ties,
        phone_ids: st.users.iter().cloned().zip(st.phones.iter().cloned()).collect(),
        peak_hours: cfg.comm.peak_hours.clone(),
        manifest: Manifest {
            seed: cfg.seed,
            config: cfg.clone(),
            records,
            per_user: per_user_counts,
        },
    };

    Ok(SynthOutput {
        roster,
        bluetooth,
        wifi,
        location,
        comm,
        survey,
        key,
        truth,
    })
}
