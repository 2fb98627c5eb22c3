//! Broadcast + viral chain-binomial model of petition signing.
//!
//! Each day `t = 1..=horizon`, with `U` susceptibles left and `I` people who
//! signed the day before:
//!
//! 1. every susceptible independently signs with probability
//!    `p = 1 - (1 - R0/N0)^I · (1 - b)`; by default the day's viral and
//!    background signers are the rounded expectation `round(U·p)`, with
//!    [`Dynamics::Binomial`] drawing `Binomial(U, p)` instead;
//! 2. on a broadcast day, `round(exp(N(μ, σ²)))` (at least 1, at most the
//!    remaining susceptibles) further users sign;
//! 3. everyone who signed today, broadcast recruits included, spreads
//!    virally tomorrow.
//!
//! Day 1 always carries a broadcast. Each later day is a broadcast day with
//! probability `(E[B] - 1)/(horizon - 1)`, so a petition averages `E[B]`
//! broadcasts. `R0 ~ U[r0_min, r0_max]` is drawn once per petition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{find_peaks, shape_moments};
use crate::stats::{ols_fit, Design, RegressionResult};
use crate::timeline::AdoptionSeries;

/// How the viral and background signers of a day are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    /// `round(U·p)`. Broadcasts and `R0` stay random.
    #[default]
    Expected,
    /// One `Binomial(U, p)` draw per day.
    Binomial,
}

impl std::str::FromStr for Dynamics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "expected" | "mean-field" | "meanfield" => Ok(Dynamics::Expected),
            "binomial" => Ok(Dynamics::Binomial),
            other => Err(Error::InvalidParameter(format!("unknown dynamics `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationParams {
    pub population: u64,
    pub horizon: usize,
    pub expected_broadcasts: f64,
    pub broadcast_log_mean: f64,
    pub broadcast_log_sd: f64,
    pub r0_min: f64,
    pub r0_max: f64,
    pub background_rate: f64,
    pub enable_broadcast: bool,
    pub enable_viral: bool,
    pub enable_background: bool,
    pub dynamics: Dynamics,
}

impl Default for SimulationParams {
    fn default() -> Self {
        SimulationParams {
            population: 10_000,
            horizon: 60,
            expected_broadcasts: 3.0,
            broadcast_log_mean: 5.0,
            broadcast_log_sd: 1.5,
            r0_min: 0.7,
            r0_max: 1.9,
            background_rate: 0.002,
            enable_broadcast: true,
            enable_viral: true,
            enable_background: true,
            dynamics: Dynamics::Expected,
        }
    }
}

impl SimulationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.population == 0 {
            return bad("population must be positive");
        }
        if self.horizon == 0 {
            return bad("horizon must be positive");
        }
        if self.expected_broadcasts.is_nan() || self.expected_broadcasts < 1.0 {
            return bad("expected_broadcasts must be at least 1");
        }
        if self.horizon == 1 && self.expected_broadcasts != 1.0 {
            return bad("a one-day horizon allows exactly one broadcast");
        }
        if self.horizon > 1 && self.later_broadcast_probability() > 1.0 {
            return bad("expected_broadcasts exceeds one per day");
        }
        if !self.broadcast_log_mean.is_finite() || !self.broadcast_log_sd.is_finite() || self.broadcast_log_sd <= 0.0 {
            return bad("broadcast log-normal needs finite mean and positive sd");
        }
        if !(0.0 <= self.r0_min && self.r0_min <= self.r0_max && self.r0_max.is_finite()) {
            return bad("need 0 <= r0_min <= r0_max");
        }
        if self.r0_max > self.population as f64 {
            return bad("r0_max cannot exceed the population");
        }
        if !(0.0..1.0).contains(&self.background_rate) {
            return bad("background_rate must lie in [0, 1)");
        }
        Ok(())
    }

    /// Broadcast probability for each of days `2..=horizon`.
    pub fn later_broadcast_probability(&self) -> f64 {
        if self.horizon <= 1 {
            0.0
        } else {
            (self.expected_broadcasts - 1.0) / (self.horizon - 1) as f64
        }
    }

    /// Same parameters with `R0` pinned to a single value.
    pub fn with_fixed_r0(&self, r0: f64) -> Self {
        SimulationParams { r0_min: r0, r0_max: r0, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedPetition {
    pub series: AdoptionSeries,
    pub r0: f64,
    pub broadcast_days: Vec<usize>,
    pub broadcast_sizes: Vec<u64>,
    /// Susceptibles left after the last day.
    pub remaining: u64,
    pub seed: u64,
}

impl SimulatedPetition {
    pub fn total(&self) -> u64 {
        self.series.total()
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of petition `index` in a cohort:
/// `splitmix64(splitmix64(master_seed) ^ index)`.
pub fn petition_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index)
}

fn binomial<R: Rng>(rng: &mut R, trials: u64, p: f64) -> u64 {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    Binomial::new(trials, p).expect("p checked to lie in (0, 1)").sample(rng)
}

pub fn simulate_petition(params: &SimulationParams, seed: u64) -> Result<SimulatedPetition> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let r0 =
        if params.r0_max > params.r0_min { rng.random_range(params.r0_min..=params.r0_max) } else { params.r0_min };
    let contact = r0 / params.population as f64;
    let escape_viral = 1.0 - contact;
    let escape_background = if params.enable_background { 1.0 - params.background_rate } else { 1.0 };
    let log_size = Normal::new(params.broadcast_log_mean, params.broadcast_log_sd)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let later_p = params.later_broadcast_probability();

    let mut susceptible = params.population;
    let mut previous = 0u64;
    let mut counts = Vec::with_capacity(params.horizon);
    let mut broadcast_days = Vec::new();
    let mut broadcast_sizes = Vec::new();

    for day in 1..=params.horizon {
        // Draw order is fixed per day so streams stay comparable across toggles.
        let is_broadcast = params.enable_broadcast && (day == 1 || rng.random_bool(later_p));
        let raw_size = if is_broadcast { Some(log_size.sample(&mut rng).exp()) } else { None };

        let mut escape = escape_background;
        if params.enable_viral && previous > 0 {
            escape *= escape_viral.powf(previous as f64);
        }
        let viral = match params.dynamics {
            Dynamics::Expected => ((susceptible as f64 * (1.0 - escape)).round() as u64).min(susceptible),
            Dynamics::Binomial => binomial(&mut rng, susceptible, 1.0 - escape),
        };
        let mut signed = viral;

        if let Some(raw) = raw_size {
            let size = (raw.round().max(1.0).min(u64::MAX as f64) as u64).min(susceptible - viral);
            signed += size;
            broadcast_days.push(day);
            broadcast_sizes.push(size);
        }

        susceptible -= signed;
        previous = signed;
        counts.push(signed);
    }

    Ok(SimulatedPetition {
        series: AdoptionSeries::daily(counts)?,
        r0,
        broadcast_days,
        broadcast_sizes,
        remaining: susceptible,
        seed,
    })
}

/// Simulates `n` petitions; petition `k` uses [`petition_seed`]`(master_seed, k)`.
/// Output order is by index regardless of how the work is scheduled.
pub fn simulate_cohort(params: &SimulationParams, n: usize, master_seed: u64) -> Result<Vec<SimulatedPetition>> {
    if n == 0 {
        return Err(Error::contract("cohort size must be at least 1"));
    }
    params.validate()?;
    (0..n as u64).map(|k| simulate_petition(params, petition_seed(master_seed, k))).collect()
}

/// Regressor names of the shape regression, in design order after the intercept.
pub const SHAPE_REGRESSORS: [&str; 4] = ["global_peak_day", "num_local_peaks", "skewness", "kurtosis"];

/// The four shape regressors of one series.
pub fn shape_regressors(series: &AdoptionSeries) -> Result<[f64; 4]> {
    let peaks = find_peaks(series);
    let moments = shape_moments(series)?;
    Ok([peaks.global_peak as f64, peaks.len() as f64, moments.skewness, moments.excess_kurtosis])
}

/// `ln(total) ~ global_peak_day + num_local_peaks + skewness + kurtosis`.
pub fn shape_regression<'a, I>(series: I) -> Result<RegressionResult>
where
    I: IntoIterator<Item = &'a AdoptionSeries>,
{
    let mut design = Design::with_intercept(SHAPE_REGRESSORS);
    let mut response = Vec::new();
    for s in series {
        design.push_row(&shape_regressors(s)?)?;
        response.push((s.total() as f64).ln());
    }
    if response.is_empty() {
        return Err(Error::contract("regression needs at least one petition"));
    }
    ols_fit(&design, &response)
}

pub fn replicate_simulated_regression(cohort: &[SimulatedPetition]) -> Result<RegressionResult> {
    shape_regression(cohort.iter().map(|p| &p.series))
}
