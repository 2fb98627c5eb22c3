//! `simulate` and `replicate`.

use std::fmt::Write as _;

use petition_pulse::simulate::{
    petition_seed, replicate_simulated_regression, simulate_petition, SimulatedPetition, SimulationParams,
};
use petition_pulse::stats::{render_table, RegressionResult, INTERCEPT};
use petition_pulse::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, SimArgs};
use crate::output::OutDir;
use crate::CliResult;

/// Cohort simulated across the rayon pool; output order is by index.
pub fn simulate_cohort_parallel(
    params: &SimulationParams,
    n: usize,
    master_seed: u64,
) -> petition_pulse::Result<Vec<SimulatedPetition>> {
    if n == 0 {
        return Err(Error::Contract("cohort size must be at least 1".into()));
    }
    params.validate()?;
    (0..n as u64).into_par_iter().map(|k| simulate_petition(params, petition_seed(master_seed, k))).collect()
}

pub fn simulate(args: &SimArgs, config: &RunConfig) -> CliResult<()> {
    let params = args.model.apply(args.common.horizon);
    let cohort = simulate_cohort_parallel(&params, args.n, args.seed)?;
    let out = OutDir::create(config)?;
    let mut cols = vec!["index".to_string(), "seed".into(), "r0".into(), "total".into(), "broadcasts".into()];
    cols.extend((1..=params.horizon).map(|d| format!("d{d}")));
    let path = out.write_csv("cohort.csv", &cols, |w| {
        for (k, p) in cohort.iter().enumerate() {
            let mut rec = vec![
                k.to_string(),
                p.seed.to_string(),
                p.r0.to_string(),
                p.total().to_string(),
                p.broadcast_days.len().to_string(),
            ];
            rec.extend(p.series.counts().iter().map(u64::to_string));
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    let mean_total = cohort.iter().map(|p| p.total() as f64).sum::<f64>() / cohort.len() as f64;
    println!("simulated {} petitions, mean total {:.1}", cohort.len(), mean_total);
    println!("wrote {}", path.display());
    Ok(())
}

/// One published simulated-regression value with its acceptance band.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Reference {
    pub term: &'static str,
    pub published: f64,
    pub band: f64,
    /// Whether the sign and p < 0.01 are part of the hard gate.
    pub gated: bool,
}

pub const PUBLISHED_SHAPE_FIT: [Reference; 6] = [
    Reference { term: "global_peak_day", published: 0.007, band: 0.005, gated: true },
    Reference { term: "num_local_peaks", published: 0.024, band: 0.02, gated: true },
    Reference { term: "skewness", published: 0.453, band: 0.15, gated: true },
    Reference { term: "kurtosis", published: -0.028, band: 0.02, gated: true },
    Reference { term: INTERCEPT, published: 5.991, band: 0.5, gated: false },
    Reference { term: "R2", published: 0.298, band: 0.10, gated: false },
];

pub const SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct TermCheck {
    pub term: &'static str,
    pub simulated: f64,
    pub p_value: Option<f64>,
    pub published: f64,
    pub band: f64,
    pub sign_ok: Option<bool>,
    pub significant: Option<bool>,
    pub in_band: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicationCheck {
    pub terms: Vec<TermCheck>,
    /// Every gated coefficient has the published sign and p < 0.01.
    pub hard_gate: bool,
    /// Every value lies within its band.
    pub soft_gate: bool,
}

pub fn check_replication(fit: &RegressionResult) -> ReplicationCheck {
    let terms: Vec<TermCheck> = PUBLISHED_SHAPE_FIT
        .iter()
        .map(|r| {
            let (simulated, p_value) = if r.term == "R2" {
                (fit.r_squared, None)
            } else {
                let j = fit.index_of(r.term).expect("shape regression has every reference term");
                (fit.coefficients[j], Some(fit.p_values[j]))
            };
            TermCheck {
                term: r.term,
                simulated,
                p_value,
                published: r.published,
                band: r.band,
                sign_ok: r.gated.then(|| simulated.signum() == r.published.signum()),
                significant: r.gated.then(|| p_value.is_some_and(|p| p < SIGNIFICANCE)),
                in_band: (simulated - r.published).abs() <= r.band,
            }
        })
        .collect();
    let hard_gate = terms.iter().all(|t| t.sign_ok != Some(false) && t.significant != Some(false));
    let soft_gate = terms.iter().all(|t| t.in_band);
    ReplicationCheck { terms, hard_gate, soft_gate }
}

pub fn render_check(check: &ReplicationCheck) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<17}{:>11}{:>11}{:>10}{:>18}{:>7}{:>7}{:>7}",
        "term", "simulated", "p", "published", "band", "sign", "p<.01", "band"
    );
    let flag = |b: Option<bool>| match b {
        Some(true) => "ok",
        Some(false) => "FAIL",
        None => "-",
    };
    for t in &check.terms {
        let name = if t.term == INTERCEPT { "Constant" } else { t.term };
        let _ = writeln!(
            s,
            "{:<17}{:>11.4}{:>11}{:>10.3}{:>18}{:>7}{:>7}{:>7}",
            name,
            t.simulated,
            t.p_value.map(|p| format!("{p:.1e}")).unwrap_or_else(|| "-".into()),
            t.published,
            format!("[{:.3}, {:.3}]", t.published - t.band, t.published + t.band),
            flag(t.sign_ok),
            flag(t.significant),
            if t.in_band { "ok" } else { "miss" },
        );
    }
    let _ = writeln!(s, "hard gate (signs, p < 0.01): {}", if check.hard_gate { "PASS" } else { "FAIL" });
    let _ = writeln!(s, "soft gate (magnitude bands): {}", if check.soft_gate { "PASS" } else { "MISS" });
    s
}

/// Returns whether the hard gate passed.
pub fn replicate(args: &SimArgs, config: &RunConfig) -> CliResult<bool> {
    let params = args.model.apply(args.common.horizon);
    let cohort = simulate_cohort_parallel(&params, args.n, args.seed)?;
    let fit = replicate_simulated_regression(&cohort)?;
    let check = check_replication(&fit);

    let text = format!("{}\n{}", render_table(&[("log(total), simulated", &fit)]), render_check(&check));
    let out = OutDir::create(config)?;
    #[derive(Serialize)]
    struct Report<'a> {
        regression: &'a RegressionResult,
        check: &'a ReplicationCheck,
    }
    out.write_json("replicate.json", &Report { regression: &fit, check: &check })?;
    out.write_text("replicate.txt", &text)?;
    print!("{text}");
    Ok(check.hard_gate)
}
