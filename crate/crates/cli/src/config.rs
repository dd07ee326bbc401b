//! Run configuration: TOML file values overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use proxnet_core::mobility::{DEFAULT_ACCURACY_MAX_M, DEFAULT_STOP_DISTANCE_M, DEFAULT_STOP_DURATION_S};
use proxnet_core::synth::SynthConfig;
use proxnet_core::time::{parse_tz, DEFAULT_BIN_WIDTH_S, DEFAULT_TZ};
use proxnet_core::wifiprox::MeasureKind;

use crate::error::{CliError, Result};

/// Environment variable giving the output directory when neither a flag
/// nor the config file does.
pub const OUT_ENV: &str = "PROXNET_OUT";
pub const DEFAULT_OUT: &str = "proxnet-out";
pub const DEFAULT_WINDOW_S: i64 = 86_400;
pub const DEFAULT_HEX_CELL_M: f64 = 250.0;

/// Keys accepted in the config file. Names follow the long flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub roster: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub bin_width_s: Option<i64>,
    pub window_s: Option<Vec<i64>>,
    pub rssi_min: Option<i32>,
    pub tz: Option<String>,
    pub measure: Option<Vec<String>>,
    pub thresholds: Option<Vec<f64>>,
    pub stop_d_m: Option<f64>,
    pub stop_t_s: Option<i64>,
    pub accuracy_max_m: Option<f64>,
    pub hex_cell_m: Option<f64>,
    pub rg_linear: Option<bool>,
    pub min_weight: Option<u64>,
    pub traffic_share: Option<f64>,
    pub phones: Option<PathBuf>,
    pub missed_as_incoming: Option<bool>,
    pub weeks: Option<u64>,
    pub key: Option<PathBuf>,
    pub min_items: Option<usize>,
    pub seed: Option<u64>,
    pub synth: Option<SynthConfig>,
}

impl FileConfig {
    /// Reads a TOML file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let err = |message: String| CliError::Config {
            path: path.to_path_buf(),
            message,
        };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut cfg: FileConfig = toml::from_str(&text).map_err(|e| err(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data, &mut cfg.roster, &mut cfg.out, &mut cfg.phones, &mut cfg.key]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Flag values; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub data: Option<PathBuf>,
    pub roster: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub bin_width_s: Option<i64>,
    pub window_s: Option<Vec<i64>>,
    pub rssi_min: Option<i32>,
    pub tz: Option<String>,
    pub measure: Option<Vec<String>>,
    pub thresholds: Option<Vec<f64>>,
    pub stop_d_m: Option<f64>,
    pub stop_t_s: Option<i64>,
    pub accuracy_max_m: Option<f64>,
    pub hex_cell_m: Option<f64>,
    pub rg_linear: Option<bool>,
    pub min_weight: Option<u64>,
    pub traffic_share: Option<f64>,
    pub phones: Option<PathBuf>,
    pub missed_as_incoming: Option<bool>,
    pub weeks: Option<u64>,
    pub key: Option<PathBuf>,
    pub min_items: Option<usize>,
    pub seed: Option<u64>,
    pub n_users: Option<usize>,
    pub n_days: Option<u32>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub roster: Option<PathBuf>,
    pub out: PathBuf,
    pub bin_width_s: i64,
    pub window_s: Vec<i64>,
    pub rssi_min: Option<i32>,
    pub tz: String,
    pub measures: Vec<MeasureKind>,
    pub thresholds: Option<Vec<f64>>,
    pub stop_d_m: f64,
    pub stop_t_s: i64,
    pub accuracy_max_m: f64,
    pub hex_cell_m: f64,
    pub rg_linear: bool,
    pub min_weight: Option<u64>,
    pub traffic_share: Option<f64>,
    pub phones: Option<PathBuf>,
    pub missed_as_incoming: bool,
    pub weeks: Option<u64>,
    pub key: Option<PathBuf>,
    pub min_items: usize,
    pub synth: SynthConfig,
}

impl RunConfig {
    /// Merge flags over file values over defaults, then check every
    /// setting. All violations are reported together.
    pub fn resolve(flags: Overrides, file: FileConfig, env_out: Option<PathBuf>) -> Result<RunConfig> {
        let mut synth = file.synth.unwrap_or_default();
        if let Some(seed) = flags.seed.or(file.seed) {
            synth.seed = seed;
        }
        if let Some(n) = flags.n_users {
            synth.n_users = n;
        }
        if let Some(n) = flags.n_days {
            synth.n_days = n;
        }
        let measure_names = flags.measure.or(file.measure);
        let mut problems = Vec::new();
        let measures = match measure_names {
            None => MeasureKind::ALL.to_vec(),
            Some(names) => {
                let mut out = Vec::new();
                for n in names {
                    match n.parse::<MeasureKind>() {
                        Ok(k) if !out.contains(&k) => out.push(k),
                        Ok(_) => {}
                        Err(e) => problems.push(e.to_string()),
                    }
                }
                out
            }
        };
        let cfg = RunConfig {
            data: flags.data.or(file.data),
            roster: flags.roster.or(file.roster),
            out: flags
                .out
                .or(file.out)
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            bin_width_s: flags.bin_width_s.or(file.bin_width_s).unwrap_or(DEFAULT_BIN_WIDTH_S),
            window_s: flags.window_s.or(file.window_s).unwrap_or_else(|| vec![DEFAULT_WINDOW_S]),
            rssi_min: flags.rssi_min.or(file.rssi_min),
            tz: flags.tz.or(file.tz).unwrap_or_else(|| DEFAULT_TZ.to_string()),
            measures,
            thresholds: flags.thresholds.or(file.thresholds),
            stop_d_m: flags.stop_d_m.or(file.stop_d_m).unwrap_or(DEFAULT_STOP_DISTANCE_M),
            stop_t_s: flags.stop_t_s.or(file.stop_t_s).unwrap_or(DEFAULT_STOP_DURATION_S),
            accuracy_max_m: flags
                .accuracy_max_m
                .or(file.accuracy_max_m)
                .unwrap_or(DEFAULT_ACCURACY_MAX_M),
            hex_cell_m: flags.hex_cell_m.or(file.hex_cell_m).unwrap_or(DEFAULT_HEX_CELL_M),
            rg_linear: flags.rg_linear.or(file.rg_linear).unwrap_or(false),
            min_weight: flags.min_weight.or(file.min_weight),
            traffic_share: flags.traffic_share.or(file.traffic_share),
            phones: flags.phones.or(file.phones),
            missed_as_incoming: flags.missed_as_incoming.or(file.missed_as_incoming).unwrap_or(false),
            weeks: flags.weeks.or(file.weeks),
            key: flags.key.or(file.key),
            min_items: flags.min_items.or(file.min_items).unwrap_or(1),
            synth,
        };
        problems.extend(cfg.problems());
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::usage(problems.join("; ")))
        }
    }

    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.bin_width_s <= 0 {
            p.push(format!("--bin-width-s must be positive, got {}", self.bin_width_s));
        }
        for w in &self.window_s {
            if *w <= 0 || self.bin_width_s <= 0 || w % self.bin_width_s != 0 {
                p.push(format!("window {w} s is not a positive multiple of the bin width"));
            }
        }
        if parse_tz(&self.tz).is_err() {
            p.push(format!("unknown time zone `{}`", self.tz));
        }
        if let Some(th) = &self.thresholds {
            if self.measures.len() != 1 {
                p.push("--thresholds needs exactly one --measure".into());
            } else if th.is_empty() {
                p.push("--thresholds is empty".into());
            } else {
                for t in th {
                    if let Err(e) = self.measures[0].with_threshold(*t) {
                        p.push(e.to_string());
                    }
                }
            }
        }
        if !(self.stop_d_m > 0.0 && self.stop_d_m.is_finite()) {
            p.push(format!("--stop-d-m must be positive, got {}", self.stop_d_m));
        }
        if self.stop_t_s <= 0 {
            p.push(format!("--stop-t-s must be positive, got {}", self.stop_t_s));
        }
        if !(self.accuracy_max_m > 0.0) {
            p.push(format!("--accuracy-max-m must be positive, got {}", self.accuracy_max_m));
        }
        if !(self.hex_cell_m > 0.0 && self.hex_cell_m.is_finite()) {
            p.push(format!("--hex-cell-m must be positive, got {}", self.hex_cell_m));
        }
        if self.min_weight == Some(0) {
            p.push("--min-weight must be at least 1".into());
        }
        if let Some(s) = self.traffic_share {
            if !(s > 0.0 && s <= 1.0) {
                p.push(format!("--traffic-share must lie in (0, 1], got {s}"));
            }
            if self.min_weight.is_some() {
                p.push("give either --min-weight or --traffic-share".into());
            }
        }
        if self.weeks == Some(0) {
            p.push("--weeks must be at least 1".into());
        }
        if self.min_items == 0 {
            p.push("--min-items must be at least 1".into());
        }
        p
    }

    /// The dataset directory, which must exist.
    pub fn data_dir(&self) -> Result<&Path> {
        let dir = self
            .data
            .as_deref()
            .ok_or_else(|| CliError::usage("no dataset directory: pass --data or set `data` in the config"))?;
        if !dir.is_dir() {
            return Err(CliError::usage(format!("dataset directory {} does not exist", dir.display())));
        }
        Ok(dir)
    }

    /// `--roster`, else `roster.csv` in the dataset directory.
    pub fn roster_path(&self) -> Result<PathBuf> {
        let p = match &self.roster {
            Some(p) => p.clone(),
            None => self.data_dir()?.join(proxnet_core::synth::ROSTER_FILE),
        };
        require_file(&p, "roster")?;
        Ok(p)
    }
}

pub(crate) fn require_file(p: &Path, what: &str) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::usage(format!("{what} file {} does not exist", p.display())))
    }
}
