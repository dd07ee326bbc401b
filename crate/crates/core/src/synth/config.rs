use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::{parse_tz, DEFAULT_BIN_WIDTH_S, DEFAULT_TZ};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SocialSpec {
    pub communities: usize,
    pub p_intra: f64,
    pub p_inter: f64,
}

impl Default for SocialSpec {
    fn default() -> Self {
        SocialSpec {
            communities: 4,
            p_intra: 0.6,
            p_inter: 0.05,
        }
    }
}

/// Square grid of campus access points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApGridSpec {
    pub count: usize,
    pub spacing_m: f64,
}

impl Default for ApGridSpec {
    fn default() -> Self {
        ApGridSpec {
            count: 25,
            spacing_m: 30.0,
        }
    }
}

/// Log-distance path loss: `ref - 10 n log10(d) + noise`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSpec {
    pub ref_dbm: f64,
    pub exponent: f64,
    pub noise_sd_db: f64,
    pub floor_dbm: f64,
    pub bt_range_m: f64,
    /// Probability that a Bluetooth scan sees a peer in range.
    pub bt_detect_prob: f64,
    /// Mean number of non-participant devices per Bluetooth scan.
    pub external_rate: f64,
    pub external_pool: usize,
}

impl Default for RadioSpec {
    fn default() -> Self {
        RadioSpec {
            ref_dbm: -40.0,
            exponent: 2.5,
            noise_sd_db: 0.0,
            floor_dbm: -90.0,
            bt_range_m: 10.0,
            bt_detect_prob: 1.0,
            external_rate: 0.5,
            external_pool: 200,
        }
    }
}

impl RadioSpec {
    /// Noise-free RSSI at `d` metres; distances under 1 m use the reference.
    pub fn expected_rssi(&self, d: f64) -> f64 {
        self.ref_dbm - 10.0 * self.exponent * d.max(1.0).log10()
    }

    /// Distance at which the noise-free RSSI reaches the floor.
    pub fn visibility_m(&self) -> f64 {
        10f64.powf((self.ref_dbm - self.floor_dbm) / (10.0 * self.exponent))
    }
}

/// Daily routine in local wall-clock hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSpec {
    /// Weekday class block `[class_start_h, class_end_h)`, preceded and
    /// followed by one hour of transit.
    pub class_start_h: u32,
    pub class_end_h: u32,
    /// Evening venue block `[venue_start_h, venue_end_h)`, preceded and
    /// followed by one hour of transit.
    pub venue_start_h: u32,
    pub venue_end_h: u32,
    pub venues: usize,
    /// Chance per user and day of going to a venue.
    pub venue_prob: f64,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec {
            class_start_h: 9,
            class_end_h: 16,
            venue_start_h: 18,
            venue_end_h: 21,
            venues: 3,
            venue_prob: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommSpec {
    /// Mean calls per day per tie that uses calls.
    pub calls_per_day: f64,
    pub sms_per_day: f64,
    /// Probability that a tie uses each channel; every tie uses at least one.
    pub p_call_tie: f64,
    pub p_sms_tie: f64,
    pub missed_prob: f64,
    /// Log-normal call duration parameters (natural log of seconds).
    pub duration_mu: f64,
    pub duration_sigma: f64,
    /// Contacts outside the cohort per user.
    pub external_contacts: usize,
    /// Local hours in which events happen.
    pub active_hours: Vec<u32>,
    /// Hours weighted `peak_weight` times more than other active hours.
    pub peak_hours: Vec<u32>,
    pub peak_weight: f64,
}

impl Default for CommSpec {
    fn default() -> Self {
        CommSpec {
            calls_per_day: 0.4,
            sms_per_day: 1.0,
            p_call_tie: 0.6,
            p_sms_tie: 0.8,
            missed_prob: 0.1,
            duration_mu: 4.5,
            duration_sigma: 1.0,
            external_contacts: 3,
            active_hours: (8..24).collect(),
            peak_hours: vec![12, 19],
            peak_weight: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocationSpec {
    /// Gaussian position error in metres.
    pub noise_m: f64,
    pub accuracy_min_m: f64,
    pub accuracy_max_m: f64,
    /// Share of fixes with a coarse (network-based) accuracy.
    pub coarse_prob: f64,
    pub coarse_accuracy_m: f64,
}

impl Default for LocationSpec {
    fn default() -> Self {
        LocationSpec {
            noise_m: 0.0,
            accuracy_min_m: 4.0,
            accuracy_max_m: 60.0,
            coarse_prob: 0.05,
            coarse_accuracy_m: 800.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurveySpec {
    pub items_per_trait: usize,
    pub answer_noise_sd: f64,
}

impl Default for SurveySpec {
    fn default() -> Self {
        SurveySpec {
            items_per_trait: 2,
            answer_noise_sd: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_days: u32,
    /// First simulated local date, `YYYY-MM-DD`.
    pub start_date: String,
    pub tz: String,
    pub bin_width_s: i64,
    /// Campus centre.
    pub center_lat: f64,
    pub center_lon: f64,
    pub social: SocialSpec,
    pub ap_grid: ApGridSpec,
    pub radio: RadioSpec,
    pub schedule: ScheduleSpec,
    pub comm: CommSpec,
    pub location: LocationSpec,
    pub survey: SurveySpec,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 24,
            n_days: 7,
            start_date: "2013-10-07".into(),
            tz: DEFAULT_TZ.into(),
            bin_width_s: DEFAULT_BIN_WIDTH_S,
            center_lat: 55.7858,
            center_lon: 12.5217,
            social: SocialSpec::default(),
            ap_grid: ApGridSpec::default(),
            radio: RadioSpec::default(),
            schedule: ScheduleSpec::default(),
            comm: CommSpec::default(),
            location: LocationSpec::default(),
            survey: SurveySpec::default(),
            seed: 1,
        }
    }
}

fn prob(v: &mut Vec<String>, name: &str, p: f64) {
    if !(0.0..=1.0).contains(&p) {
        v.push(format!("{name} = {p} is not a probability"));
    }
}

fn nonneg(v: &mut Vec<String>, name: &str, x: f64) {
    if !(x.is_finite() && x >= 0.0) {
        v.push(format!("{name} = {x} must be finite and >= 0"));
    }
}

fn positive(v: &mut Vec<String>, name: &str, x: f64) {
    if !(x.is_finite() && x > 0.0) {
        v.push(format!("{name} = {x} must be finite and > 0"));
    }
}

impl SynthConfig {
    pub fn start(&self) -> Result<NaiveDate> {
        NaiveDate::parse_from_str(&self.start_date, "%Y-%m-%d")
            .map_err(|e| Error::invalid(format!("start_date {:?}: {e}", self.start_date)))
    }

    /// All violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.n_users < 2 {
            v.push("n_users must be >= 2".into());
        }
        if self.n_days < 1 {
            v.push("n_days must be >= 1".into());
        }
        if self.start().is_err() {
            v.push(format!("start_date {:?} is not YYYY-MM-DD", self.start_date));
        }
        if parse_tz(&self.tz).is_err() {
            v.push(format!("unknown time zone {:?}", self.tz));
        }
        if self.bin_width_s <= 0 || 3600 % self.bin_width_s != 0 {
            v.push(format!("bin_width_s = {} must divide 3600", self.bin_width_s));
        }
        if !(-80.0..=80.0).contains(&self.center_lat) || !(-180.0..=180.0).contains(&self.center_lon) {
            v.push("campus centre out of range".into());
        }
        let s = &self.social;
        if s.communities < 1 || s.communities > self.n_users.max(1) {
            v.push(format!("social.communities = {} must be in 1..=n_users", s.communities));
        }
        prob(&mut v, "social.p_intra", s.p_intra);
        prob(&mut v, "social.p_inter", s.p_inter);
        if self.ap_grid.count < 1 {
            v.push("ap_grid.count must be >= 1".into());
        }
        if self.ap_grid.count < s.communities {
            v.push("ap_grid.count must be >= social.communities (one classroom per AP)".into());
        }
        positive(&mut v, "ap_grid.spacing_m", self.ap_grid.spacing_m);
        let r = &self.radio;
        if !(r.ref_dbm > r.floor_dbm) {
            v.push("radio.ref_dbm must exceed radio.floor_dbm".into());
        }
        positive(&mut v, "radio.exponent", r.exponent);
        nonneg(&mut v, "radio.noise_sd_db", r.noise_sd_db);
        positive(&mut v, "radio.bt_range_m", r.bt_range_m);
        prob(&mut v, "radio.bt_detect_prob", r.bt_detect_prob);
        nonneg(&mut v, "radio.external_rate", r.external_rate);
        if r.external_pool < 1 {
            v.push("radio.external_pool must be >= 1".into());
        }
        if self.ap_grid.spacing_m.is_finite() && self.ap_grid.spacing_m <= r.bt_range_m {
            v.push("ap_grid.spacing_m must exceed radio.bt_range_m so classrooms stay apart".into());
        }
        let sc = &self.schedule;
        if !(1 <= sc.class_start_h && sc.class_start_h < sc.class_end_h && sc.class_end_h <= 22) {
            v.push("schedule needs 1 <= class_start_h < class_end_h <= 22".into());
        }
        if !(sc.class_end_h < sc.venue_start_h && sc.venue_start_h < sc.venue_end_h && sc.venue_end_h <= 23) {
            v.push("schedule needs class_end_h < venue_start_h < venue_end_h <= 23".into());
        }
        if sc.venues < 1 {
            v.push("schedule.venues must be >= 1".into());
        }
        prob(&mut v, "schedule.venue_prob", sc.venue_prob);
        let c = &self.comm;
        nonneg(&mut v, "comm.calls_per_day", c.calls_per_day);
        nonneg(&mut v, "comm.sms_per_day", c.sms_per_day);
        prob(&mut v, "comm.p_call_tie", c.p_call_tie);
        prob(&mut v, "comm.p_sms_tie", c.p_sms_tie);
        prob(&mut v, "comm.missed_prob", c.missed_prob);
        positive(&mut v, "comm.duration_sigma", c.duration_sigma);
        if !c.duration_mu.is_finite() {
            v.push("comm.duration_mu must be finite".into());
        }
        if c.active_hours.is_empty() || c.active_hours.iter().any(|h| *h > 23) {
            v.push("comm.active_hours must be non-empty hours in 0..=23".into());
        }
        if c.peak_hours.iter().any(|h| !c.active_hours.contains(h)) {
            v.push("comm.peak_hours must be active hours".into());
        }
        positive(&mut v, "comm.peak_weight", c.peak_weight);
        let l = &self.location;
        nonneg(&mut v, "location.noise_m", l.noise_m);
        positive(&mut v, "location.accuracy_min_m", l.accuracy_min_m);
        if !(l.accuracy_max_m >= l.accuracy_min_m) {
            v.push("location.accuracy_max_m must be >= accuracy_min_m".into());
        }
        prob(&mut v, "location.coarse_prob", l.coarse_prob);
        positive(&mut v, "location.coarse_accuracy_m", l.coarse_accuracy_m);
        if self.survey.items_per_trait < 1 {
            v.push("survey.items_per_trait must be >= 1".into());
        }
        nonneg(&mut v, "survey.answer_noise_sd", self.survey.answer_noise_sd);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}
