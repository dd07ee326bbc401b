//! `proxnet`: one subcommand per analysis, each writing plot-ready CSV and
//! JSON files into an output directory.
//!
//! Settings come from flags, then from a TOML file given with `--config`
//! (keys are the long flag names with `_` for `-`), then from defaults.
//! The output directory falls back to `$PROXNET_OUT`.
//!
//! Exit codes: 0 success, 1 validation (bad flags, config or input files),
//! 2 runtime failure.

mod commands;
pub mod config;
pub mod error;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use config::{FileConfig, Overrides, RunConfig, OUT_ENV};
pub use error::{CliError, Result, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION};

#[derive(Debug, Parser)]
#[command(name = "proxnet", version, about = "Multi-channel proximity and mobility analysis")]
pub struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output directory [default: $PROXNET_OUT, else ./proxnet-out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

/// Dataset location shared by the analysis commands.
#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Directory holding the channel CSV files.
    #[arg(long, value_name = "DIR")]
    pub data: Option<PathBuf>,

    /// Participant roster [default: roster.csv in the data directory].
    #[arg(long, value_name = "FILE")]
    pub roster: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate channel files and report rejected rows.
    Ingest {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Bluetooth proximity networks, activity and degree/weight distributions.
    Btnet {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        bin_width_s: Option<i64>,
        /// Aggregation windows in seconds (comma separated).
        #[arg(long, value_delimiter = ',')]
        window_s: Option<Vec<i64>>,
        /// Ignore sightings weaker than this RSSI (dBm).
        #[arg(long, allow_negative_numbers = true)]
        rssi_min: Option<i32>,
    },
    /// Score WiFi similarity measures against Bluetooth proximity.
    Wifieval {
        #[command(flatten)]
        data: DataArgs,
        /// Bluetooth bin width; must divide the 600 s WiFi bin.
        #[arg(long)]
        bin_width_s: Option<i64>,
        /// Measures to evaluate (comma separated) [default: all].
        #[arg(long, value_delimiter = ',')]
        measure: Option<Vec<String>>,
        /// Threshold sweep for a single measure (comma separated).
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        #[arg(long, allow_negative_numbers = true)]
        rssi_min: Option<i32>,
    },
    /// Location accuracy, radius of gyration, stops, transitions, hexbins.
    Mobility {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        stop_d_m: Option<f64>,
        #[arg(long)]
        stop_t_s: Option<i64>,
        #[arg(long)]
        accuracy_max_m: Option<f64>,
        #[arg(long)]
        hex_cell_m: Option<f64>,
        /// Estimate the r_g density on the linear scale instead of log10.
        #[arg(long)]
        rg_linear: bool,
    },
    /// Call and SMS statistics and the weekly activity grid.
    Comms {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        tz: Option<String>,
        /// Count missed calls as incoming in the in/out ratio.
        #[arg(long)]
        missed_as_incoming: bool,
        /// Weeks to normalise by [default: span of the events].
        #[arg(long)]
        weeks: Option<u64>,
    },
    /// Graph summaries and face-to-face versus phone edge differences.
    Netstats {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        bin_width_s: Option<i64>,
        /// Drop Bluetooth links seen in fewer bins.
        #[arg(long)]
        min_weight: Option<u64>,
        /// Choose the weak-link cut keeping this share of the total weight.
        #[arg(long)]
        traffic_share: Option<f64>,
        /// Phone-hash directory [default: phones.csv in the data directory].
        #[arg(long, value_name = "FILE")]
        phones: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        rssi_min: Option<i32>,
    },
    /// Big Five scores and cohort summary.
    Survey {
        #[command(flatten)]
        data: DataArgs,
        /// Scoring key [default: key.csv in the data directory].
        #[arg(long, value_name = "FILE")]
        key: Option<PathBuf>,
        /// Answered items needed per trait.
        #[arg(long)]
        min_items: Option<usize>,
    },
    /// Generate a synthetic dataset with ground truth.
    Synth {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_users: Option<usize>,
        #[arg(long)]
        n_days: Option<u32>,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        let mut o = Overrides {
            out: self.out.clone(),
            ..Default::default()
        };
        let set_data = |o: &mut Overrides, d: &DataArgs| {
            o.data = d.data.clone();
            o.roster = d.roster.clone();
        };
        let flag = |b: bool| b.then_some(true);
        match &self.command {
            Command::Ingest { data } => set_data(&mut o, data),
            Command::Btnet {
                data,
                bin_width_s,
                window_s,
                rssi_min,
            } => {
                set_data(&mut o, data);
                o.bin_width_s = *bin_width_s;
                o.window_s = window_s.clone();
                o.rssi_min = *rssi_min;
            }
            Command::Wifieval {
                data,
                bin_width_s,
                measure,
                thresholds,
                rssi_min,
            } => {
                set_data(&mut o, data);
                o.bin_width_s = *bin_width_s;
                o.measure = measure.clone();
                o.thresholds = thresholds.clone();
                o.rssi_min = *rssi_min;
            }
            Command::Mobility {
                data,
                stop_d_m,
                stop_t_s,
                accuracy_max_m,
                hex_cell_m,
                rg_linear,
            } => {
                set_data(&mut o, data);
                o.stop_d_m = *stop_d_m;
                o.stop_t_s = *stop_t_s;
                o.accuracy_max_m = *accuracy_max_m;
                o.hex_cell_m = *hex_cell_m;
                o.rg_linear = flag(*rg_linear);
            }
            Command::Comms {
                data,
                tz,
                missed_as_incoming,
                weeks,
            } => {
                set_data(&mut o, data);
                o.tz = tz.clone();
                o.missed_as_incoming = flag(*missed_as_incoming);
                o.weeks = *weeks;
            }
            Command::Netstats {
                data,
                bin_width_s,
                min_weight,
                traffic_share,
                phones,
                rssi_min,
            } => {
                set_data(&mut o, data);
                o.bin_width_s = *bin_width_s;
                o.min_weight = *min_weight;
                o.traffic_share = *traffic_share;
                o.phones = phones.clone();
                o.rssi_min = *rssi_min;
            }
            Command::Survey { data, key, min_items } => {
                set_data(&mut o, data);
                o.key = key.clone();
                o.min_items = *min_items;
            }
            Command::Synth { seed, n_users, n_days } => {
                o.seed = *seed;
                o.n_users = *n_users;
                o.n_days = *n_days;
            }
        }
        o
    }

    /// Resolves settings against the config file and `env_out`.
    pub fn resolve(&self, env_out: Option<PathBuf>) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        RunConfig::resolve(self.overrides(), file, env_out)
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, env_out: Option<PathBuf>) -> Result<Outcome> {
    let cfg = cli.resolve(env_out)?;
    match cli.command {
        Command::Ingest { .. } => commands::ingest(&cfg),
        Command::Btnet { .. } => commands::btnet(&cfg),
        Command::Wifieval { .. } => commands::wifieval(&cfg),
        Command::Mobility { .. } => commands::mobility(&cfg),
        Command::Comms { .. } => commands::comms(&cfg),
        Command::Netstats { .. } => commands::netstats(&cfg),
        Command::Survey { .. } => commands::survey(&cfg),
        Command::Synth { .. } => commands::synth(&cfg),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Messages go to stdout and stderr.
pub fn main_with<I, T>(args: I, env_out: Option<PathBuf>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli, env_out) {
        Ok(outcome) => {
            println!("{outcome}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("proxnet: {e}");
            e.exit_code()
        }
    }
}
