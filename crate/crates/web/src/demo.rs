use petition_pulse::metrics::{find_peaks, PetitionMetrics};
use petition_pulse::simulate::{replicate_simulated_regression, simulate_cohort, SimulationParams};
use petition_pulse::stats::{render_table, RegressionResult};
use petition_pulse::AdoptionSeries;
use serde::Serialize;

/// Largest cohort the page may request; keeps a click under a few seconds.
pub const MAX_COHORT: usize = 20_000;

fn params(json: &str) -> Result<SimulationParams, String> {
    let p: SimulationParams = if json.trim().is_empty() {
        SimulationParams::default()
    } else {
        serde_json::from_str(json).map_err(|e| format!("bad parameters: {e}"))?
    };
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

#[derive(Serialize)]
struct Analysis {
    counts: Vec<u64>,
    peaks: Vec<usize>,
    metrics: PetitionMetrics,
}

fn analysis(series: &AdoptionSeries) -> Result<Analysis, String> {
    Ok(Analysis {
        counts: series.counts().to_vec(),
        peaks: find_peaks(series).indices,
        metrics: PetitionMetrics::compute(series, None).map_err(|e| e.to_string())?,
    })
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn simulate(params_json: &str, seed: u64) -> Result<String, String> {
    #[derive(Serialize)]
    struct Out {
        r0: f64,
        broadcast_days: Vec<usize>,
        broadcast_sizes: Vec<u64>,
        remaining: u64,
        #[serde(flatten)]
        analysis: Analysis,
    }
    let p = params(params_json)?;
    let run = petition_pulse::simulate::simulate_petition(&p, seed).map_err(|e| e.to_string())?;
    json(&Out {
        r0: run.r0,
        broadcast_days: run.broadcast_days.clone(),
        broadcast_sizes: run.broadcast_sizes.clone(),
        remaining: run.remaining,
        analysis: analysis(&run.series)?,
    })
}

pub fn parse_counts(text: &str) -> Result<Vec<u64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| format!("`{t}` is not a nonnegative integer")))
        .collect()
}

pub fn analyze(counts: &str) -> Result<String, String> {
    let counts = parse_counts(counts)?;
    if counts.len() < 2 {
        return Err("enter at least two days".into());
    }
    let series = AdoptionSeries::daily(counts).map_err(|e| e.to_string())?;
    json(&analysis(&series)?)
}

pub fn replicate(params_json: &str, n: usize, seed: u64) -> Result<String, String> {
    #[derive(Serialize)]
    struct Out<'a> {
        table: String,
        regression: &'a RegressionResult,
        mean_total: f64,
    }
    if !(10..=MAX_COHORT).contains(&n) {
        return Err(format!("cohort size must be between 10 and {MAX_COHORT}"));
    }
    let p = params(params_json)?;
    let cohort = simulate_cohort(&p, n, seed).map_err(|e| e.to_string())?;
    let fit = replicate_simulated_regression(&cohort).map_err(|e| e.to_string())?;
    let mean_total = cohort.iter().map(|c| c.total() as f64).sum::<f64>() / n as f64;
    json(&Out { table: render_table(&[("log(total)", &fit)]), regression: &fit, mean_total })
}
