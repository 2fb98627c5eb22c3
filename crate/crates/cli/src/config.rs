use std::path::PathBuf;

use chrono::{DateTime, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use petition_pulse::metrics::RESPONSE_DEADLINE_DAYS;
use petition_pulse::simulate::{Dynamics, SimulationParams};
use petition_pulse::Period;
use serde::Serialize;

pub const DEFAULT_CUTOFF: &str = "2013-01-15T00:00:00Z";

#[derive(Debug, Parser)]
#[command(name = "petition-pulse", version, about = "Broadcast vs. viral dynamics of petition signatures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate input files and write a diagnostics report.
    Ingest(DataArgs),
    /// Per-petition exceed ratios, shape moments and threshold statistics.
    Metrics(DataArgs),
    /// Successful vs. unsuccessful group comparisons and the FDSD chi-square test.
    Compare(DataArgs),
    /// Shape regressions of total signatures (four models plus the days 1-30 variant).
    Regress(DataArgs),
    /// Aggregate daily curves and the peak-day profile.
    Curves(DataArgs),
    /// Simulate a cohort of petitions and export it.
    Simulate(SimArgs),
    /// Simulate a cohort and compare its shape regression with the published one.
    Replicate(SimArgs),
    /// Mean distance between Zipcodes of consecutive signatures.
    Geo(DataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodArg {
    Day,
    Hour,
}

impl From<PeriodArg> for Period {
    fn from(p: PeriodArg) -> Period {
        match p {
            PeriodArg::Day => Period::Day,
            PeriodArg::Hour => Period::Hour,
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub petitions: PathBuf,
    #[arg(long)]
    pub signatures: PathBuf,
    #[arg(long)]
    pub centroids: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Success regime cutoff (ISO-8601 date or date-time).
    #[arg(long, default_value = DEFAULT_CUTOFF, value_parser = parse_cutoff)]
    pub cutoff: i64,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    /// Day of the response deadline used by the temporal threshold statistic.
    #[arg(long, default_value_t = RESPONSE_DEADLINE_DAYS)]
    pub deadline: usize,
    #[arg(long, value_enum, default_value_t = PeriodArg::Day)]
    pub period: PeriodArg,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Horizon in days.
    #[arg(long, default_value_t = 60)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[command(flatten)]
    pub model: ModelArgs,
}

/// Overrides of the simulation defaults; unset flags keep the default.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub population: Option<u64>,
    #[arg(long)]
    pub expected_broadcasts: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub broadcast_log_mean: Option<f64>,
    #[arg(long)]
    pub broadcast_log_sd: Option<f64>,
    #[arg(long)]
    pub r0_min: Option<f64>,
    #[arg(long)]
    pub r0_max: Option<f64>,
    #[arg(long)]
    pub background_rate: Option<f64>,
    #[arg(long)]
    pub no_broadcast: bool,
    #[arg(long)]
    pub no_viral: bool,
    #[arg(long)]
    pub no_background: bool,
    /// `expected` or `binomial`.
    #[arg(long)]
    pub dynamics: Option<Dynamics>,
}

impl ModelArgs {
    pub fn apply(&self, horizon: usize) -> SimulationParams {
        let d = SimulationParams::default();
        SimulationParams {
            population: self.population.unwrap_or(d.population),
            horizon,
            expected_broadcasts: self.expected_broadcasts.unwrap_or(d.expected_broadcasts),
            broadcast_log_mean: self.broadcast_log_mean.unwrap_or(d.broadcast_log_mean),
            broadcast_log_sd: self.broadcast_log_sd.unwrap_or(d.broadcast_log_sd),
            r0_min: self.r0_min.unwrap_or(d.r0_min),
            r0_max: self.r0_max.unwrap_or(d.r0_max),
            background_rate: self.background_rate.unwrap_or(d.background_rate),
            enable_broadcast: !self.no_broadcast,
            enable_viral: !self.no_viral,
            enable_background: !self.no_background,
            dynamics: self.dynamics.unwrap_or(d.dynamics),
        }
    }
}

pub fn parse_cutoff(raw: &str) -> Result<i64, String> {
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        return Ok(t.timestamp());
    }
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp());
    }
    Err(format!("`{raw}` is not an ISO-8601 date or date-time"))
}

/// Effective configuration echoed into every sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub petitions: Option<PathBuf>,
    pub signatures: Option<PathBuf>,
    pub centroids: Option<PathBuf>,
    pub out: PathBuf,
    pub horizon: usize,
    pub period: Option<PeriodArg>,
    pub regime_cutoff: Option<i64>,
    pub window: Option<usize>,
    pub deadline: Option<usize>,
    pub simulation: Option<SimulationParams>,
    pub master_seed: Option<u64>,
    pub n: Option<usize>,
}

impl RunConfig {
    pub fn for_data(command: &'static str, a: &DataArgs) -> RunConfig {
        RunConfig {
            command,
            petitions: Some(a.petitions.clone()),
            signatures: Some(a.signatures.clone()),
            centroids: a.centroids.clone(),
            out: a.common.out.clone(),
            horizon: a.common.horizon,
            period: Some(a.period),
            regime_cutoff: Some(a.cutoff),
            window: Some(a.window),
            deadline: Some(a.deadline),
            simulation: None,
            master_seed: None,
            n: None,
        }
    }

    pub fn for_sim(command: &'static str, a: &SimArgs) -> RunConfig {
        RunConfig {
            command,
            petitions: None,
            signatures: None,
            centroids: None,
            out: a.common.out.clone(),
            horizon: a.common.horizon,
            period: None,
            regime_cutoff: None,
            window: None,
            deadline: None,
            simulation: Some(a.model.apply(a.common.horizon)),
            master_seed: Some(a.seed),
            n: Some(a.n),
        }
    }
}
