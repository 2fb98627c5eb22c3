//! Subcommands over an archived dataset.

use std::collections::BTreeMap;

use petition_pulse::ingest::{assemble, load_centroids, load_petitions, load_signatures, Dataset, Diagnostics};
use petition_pulse::metrics::{
    adjacent_pair_mean_distance, classify_success, deadline_stat, find_peaks, goal_gradient_stat, peak_day_profile,
    success_threshold, CentroidTable, DropRatio, PetitionMetrics, ThresholdStat,
};
use petition_pulse::stats::{
    chi_square_2x2, group_compare, ols_fit, render_table, ChiSquareTest, Design, GroupComparison, RegressionResult,
};
use petition_pulse::{AdoptionSeries, Error, Period};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DataArgs, RunConfig};
use crate::output::{header, num, OutDir};
use crate::{CliError, CliResult};

pub struct Loaded {
    pub dataset: Dataset,
    pub centroids: Option<CentroidTable>,
}

pub fn load(args: &DataArgs) -> CliResult<Loaded> {
    let mut diag = Diagnostics::default();
    let petitions = load_petitions(&args.petitions, &mut diag)?;
    let signatures = load_signatures(&args.signatures, &mut diag)?;
    let centroids = args.centroids.as_ref().map(|p| load_centroids(p, &mut diag)).transpose()?;
    Ok(Loaded { dataset: assemble(petitions, signatures, diag), centroids })
}

/// Everything computed for one petition.
pub struct Row {
    pub petition_id: String,
    pub signature_count: u64,
    pub success: bool,
    pub daily: AdoptionSeries,
    pub metrics: PetitionMetrics,
    pub goal_gradient: ThresholdStat,
    pub deadline: Option<ThresholdStat>,
}

pub struct Table {
    /// Sorted by petition id.
    pub rows: Vec<Row>,
    /// Petitions with no signatures inside the horizon.
    pub excluded: Vec<String>,
}

pub fn compute_rows(dataset: &Dataset, args: &DataArgs) -> CliResult<Table> {
    let horizon = args.common.horizon;
    if horizon < 2 {
        return Err(CliError::Config("metrics need a horizon of at least 2 days".into()));
    }
    let ids: Vec<&String> = dataset.petitions.keys().collect();
    let computed: Vec<Result<Option<Row>, Error>> = ids
        .par_iter()
        .map(|id| {
            let record = &dataset.petitions[*id];
            let events = dataset.events(id);
            let mut daily = petition_pulse::timeline::bin_events(events, record.created, Period::Day, horizon)?.series;
            if daily.total() == 0 {
                return Ok(None);
            }
            daily.petition_id = id.to_string();
            let hourly =
                petition_pulse::timeline::bin_events(events, record.created, Period::Hour, horizon * 24)?.series;
            let metrics = PetitionMetrics::compute(&daily, Some(&hourly))?;
            let goal_gradient =
                goal_gradient_stat(&daily, success_threshold(record.created, args.cutoff), args.window)?;
            let deadline = if args.deadline >= args.window && args.deadline + args.window <= horizon {
                Some(deadline_stat(&daily, args.deadline, args.window)?)
            } else {
                None
            };
            Ok(Some(Row {
                petition_id: id.to_string(),
                signature_count: record.signature_count,
                success: classify_success(record, args.cutoff),
                daily,
                metrics,
                goal_gradient,
                deadline,
            }))
        })
        .collect();
    let mut rows = Vec::with_capacity(ids.len());
    let mut excluded = Vec::new();
    for (id, r) in ids.into_iter().zip(computed) {
        match r? {
            Some(row) => rows.push(row),
            None => excluded.push(id.clone()),
        }
    }
    Ok(Table { rows, excluded })
}

fn drop_cells(stat: Option<&ThresholdStat>) -> [String; 4] {
    let Some(s) = stat else { return Default::default() };
    let kind = match s.drop_ratio {
        DropRatio::Ratio(_) => "ratio",
        DropRatio::ZeroOverZero => "zero_over_zero",
        DropRatio::Unbounded => "unbounded",
        DropRatio::Undefined => "undefined",
    };
    [num(s.pre_mean), num(s.post_mean), num(s.drop_ratio.value()), kind.to_string()]
}

pub fn ingest(args: &DataArgs, config: &RunConfig) -> CliResult<()> {
    let loaded = load(args)?;
    let ds = &loaded.dataset;
    let summary = ds.summary();
    let successful = ds.petitions.values().filter(|p| classify_success(p, args.cutoff)).count();

    #[derive(Serialize)]
    struct Report<'a> {
        summary: petition_pulse::ingest::DatasetSummary,
        successful_petitions: usize,
        centroids: Option<usize>,
        diagnostics: &'a Diagnostics,
    }
    let out = OutDir::create(config)?;
    let path = out.write_json(
        "diagnostics.json",
        &Report {
            summary,
            successful_petitions: successful,
            centroids: loaded.centroids.as_ref().map(CentroidTable::len),
            diagnostics: &ds.diagnostics,
        },
    )?;
    println!(
        "{} petitions ({} successful), {} signatures, {} orphan signatures, {} rejected rows",
        summary.petitions, successful, summary.signatures, summary.orphan_signatures, ds.diagnostics.rejected_rows
    );
    println!("wrote {}", path.display());
    Ok(())
}

pub fn metrics(args: &DataArgs, config: &RunConfig) -> CliResult<()> {
    let loaded = load(args)?;
    let table = compute_rows(&loaded.dataset, args)?;
    let out = OutDir::create(config)?;
    let cols = header(&[
        "petition_id",
        "signature_count",
        "success",
        "total",
        "e_tot_daily",
        "e_tot_hourly",
        "e_gpo",
        "fdsd",
        "global_peak_day",
        "num_local_peaks",
        "mean_day",
        "variance",
        "skewness",
        "excess_kurtosis",
        "degenerate",
        "goal_crossing_day",
        "goal_pre_mean",
        "goal_post_mean",
        "goal_drop_ratio",
        "goal_drop_kind",
        "deadline_pre_mean",
        "deadline_post_mean",
        "deadline_drop_ratio",
        "deadline_drop_kind",
    ]);
    let path = out.write_csv("metrics.csv", &cols, |w| {
        for r in &table.rows {
            let m = &r.metrics;
            let mut rec = vec![
                r.petition_id.clone(),
                r.signature_count.to_string(),
                r.success.to_string(),
                m.total.to_string(),
                num(Some(m.e_tot_daily)),
                num(m.e_tot_hourly),
                num(Some(m.e_gpo)),
                m.fdsd.to_string(),
                m.global_peak_day.to_string(),
                m.num_local_peaks.to_string(),
                num(Some(m.shape.mean)),
                num(Some(m.shape.variance)),
                num(Some(m.shape.skewness)),
                num(Some(m.shape.excess_kurtosis)),
                m.shape.degenerate.to_string(),
                r.goal_gradient.crossing_period.map(|c| c.to_string()).unwrap_or_default(),
            ];
            rec.extend(drop_cells(Some(&r.goal_gradient)));
            rec.extend(drop_cells(r.deadline.as_ref()));
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    println!(
        "{} petitions written, {} excluded (no signatures within {} days)",
        table.rows.len(),
        table.excluded.len(),
        args.common.horizon
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[derive(Serialize)]
struct Comparison {
    measure: &'static str,
    result: Option<GroupComparison>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CompareReport {
    comparisons: Vec<Comparison>,
    /// `[[successful & fdsd, successful & !fdsd], [unsuccessful & fdsd, unsuccessful & !fdsd]]`.
    fdsd_table: [[u64; 2]; 2],
    fdsd_rate_successful: Option<f64>,
    fdsd_rate_unsuccessful: Option<f64>,
    fdsd_chi_square: Option<ChiSquareTest>,
    median_goal_drop_successful: Option<f64>,
    median_deadline_drop_unsuccessful: Option<f64>,
    excluded_petitions: usize,
}

pub fn compare(args: &DataArgs, config: &RunConfig) -> CliResult<()> {
    let loaded = load(args)?;
    let table = compute_rows(&loaded.dataset, args)?;
    let labels: Vec<bool> = table.rows.iter().map(|r| r.success).collect();
    type Pick = fn(&Row) -> f64;
    let measures: [(&'static str, Pick); 3] = [
        ("e_tot_daily", |r| r.metrics.e_tot_daily),
        ("e_tot_hourly", |r| r.metrics.e_tot_hourly.expect("hourly series always computed")),
        ("e_gpo", |r| r.metrics.e_gpo),
    ];
    let comparisons: Vec<Comparison> = measures
        .iter()
        .map(|(name, pick)| {
            let values: Vec<f64> = table.rows.iter().map(pick).collect();
            match group_compare(&values, &labels) {
                Ok(c) => Comparison { measure: name, result: Some(c), error: None },
                Err(e) => Comparison { measure: name, result: None, error: Some(e.to_string()) },
            }
        })
        .collect();

    let mut fdsd_table = [[0u64; 2]; 2];
    for r in &table.rows {
        fdsd_table[usize::from(!r.success)][usize::from(!r.metrics.fdsd)] += 1;
    }
    let rate = |row: [u64; 2]| {
        let n = row[0] + row[1];
        (n > 0).then(|| row[0] as f64 / n as f64)
    };
    let report = CompareReport {
        comparisons,
        fdsd_table,
        fdsd_rate_successful: rate(fdsd_table[0]),
        fdsd_rate_unsuccessful: rate(fdsd_table[1]),
        fdsd_chi_square: chi_square_2x2(fdsd_table).ok(),
        median_goal_drop_successful: median(
            table.rows.iter().filter(|r| r.success).filter_map(|r| r.goal_gradient.drop_ratio.value()).collect(),
        ),
        median_deadline_drop_unsuccessful: median(
            table
                .rows
                .iter()
                .filter(|r| !r.success)
                .filter_map(|r| r.deadline.and_then(|d| d.drop_ratio.value()))
                .collect(),
        ),
        excluded_petitions: table.excluded.len(),
    };

    let out = OutDir::create(config)?;
    let cols = header(&[
        "measure",
        "successful_n",
        "successful_mean",
        "successful_sd",
        "unsuccessful_n",
        "unsuccessful_mean",
        "unsuccessful_sd",
        "relative_gap",
        "t",
        "df",
        "p",
    ]);
    let csv_path = out.write_csv("compare.csv", &cols, |w| {
        for c in &report.comparisons {
            let Some(g) = &c.result else {
                w.write_record([c.measure, "", "", "", "", "", "", "", "", "", ""])?;
                continue;
            };
            w.write_record([
                c.measure.to_string(),
                g.positive.n.to_string(),
                num(Some(g.positive.mean)),
                num(Some(g.positive.sd)),
                g.negative.n.to_string(),
                num(Some(g.negative.mean)),
                num(Some(g.negative.sd)),
                num(Some(g.relative_gap())),
                num(Some(g.test.t)),
                g.test.df.to_string(),
                format!("{:e}", g.test.p),
            ])?;
        }
        Ok(())
    })?;
    let json_path = out.write_json("compare.json", &report)?;

    println!("{:<14}{:>22}{:>22}{:>10}{:>12}", "measure", "successful", "unsuccessful", "gap", "p");
    for c in &report.comparisons {
        match (&c.result, &c.error) {
            (Some(g), _) => println!(
                "{:<14}{:>22}{:>22}{:>9.1}%{:>12.2e}",
                c.measure,
                format!("{:.3} (sd={:.2})", g.positive.mean, g.positive.sd),
                format!("{:.3} (sd={:.2})", g.negative.mean, g.negative.sd),
                100.0 * g.relative_gap(),
                g.test.p
            ),
            (None, Some(e)) => println!("{:<14}{e}", c.measure),
            _ => {}
        }
    }
    let pct = |r: Option<f64>| r.map(|v| format!("{:.1}%", 100.0 * v)).unwrap_or_else(|| "n/a".into());
    print!(
        "FDSD: {} of successful, {} of unsuccessful",
        pct(report.fdsd_rate_successful),
        pct(report.fdsd_rate_unsuccessful)
    );
    match &report.fdsd_chi_square {
        Some(t) => println!("; chi-square {:.3}, p = {:.2e}", t.statistic, t.p),
        None => println!("; chi-square undefined (empty row or column)"),
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

pub const MODEL_NAMES: [&str; 5] = ["Model 1", "Model 2", "Model 3", "Model 4", "Days 1-30"];

/// The four shape models plus the days 1-30 re-regression.
pub fn regression_models(rows: &[Row]) -> CliResult<Vec<(&'static str, RegressionResult)>> {
    let total: Vec<f64> = rows.iter().map(|r| r.metrics.total as f64).collect();
    let log_total: Vec<f64> = total.iter().map(|t| t.ln()).collect();
    let fit = |names: &[&str], pick: &dyn Fn(&Row) -> Vec<f64>, y: &[f64]| -> CliResult<RegressionResult> {
        let mut d = Design::with_intercept(names.iter().copied());
        for r in rows {
            d.push_row(&pick(r))?;
        }
        Ok(ols_fit(&d, y)?)
    };
    let shape4 = |r: &Row| {
        vec![
            r.metrics.shape.skewness,
            r.metrics.shape.excess_kurtosis,
            r.metrics.global_peak_day as f64,
            r.metrics.num_local_peaks as f64,
        ]
    };
    let four = ["skewness", "kurtosis", "global_peak_day", "num_local_peaks"];
    let mut models = vec![
        (
            MODEL_NAMES[0],
            fit(&four[..2], &|r| vec![r.metrics.shape.skewness, r.metrics.shape.excess_kurtosis], &total)?,
        ),
        (MODEL_NAMES[1], fit(&four[2..3], &|r| vec![r.metrics.global_peak_day as f64], &total)?),
        (MODEL_NAMES[2], fit(&four, &shape4, &total)?),
        (MODEL_NAMES[3], fit(&four, &shape4, &log_total)?),
    ];
    if rows.first().is_some_and(|r| r.daily.horizon() >= 30) {
        let early = |r: &Row| vec![find_peaks(&r.daily.truncate(30).expect("horizon checked")).len() as f64];
        models.push((MODEL_NAMES[4], fit(&["num_local_peaks"], &early, &log_total)?));
    }
    Ok(models)
}

pub fn regress(args: &DataArgs, config: &RunConfig) -> CliResult<()> {
    let loaded = load(args)?;
    let table = compute_rows(&loaded.dataset, args)?;
    let models = regression_models(&table.rows)?;
    let refs: Vec<(&str, &RegressionResult)> = models.iter().map(|(n, m)| (*n, m)).collect();
    let text = render_table(&refs);
    let out = OutDir::create(config)?;
    let txt = out.write_text("regress.txt", &text)?;
    let json: BTreeMap<&str, &RegressionResult> = refs.iter().copied().collect();
    let js = out.write_json("regress.json", &json)?;
    print!("{text}");
    println!("excluded {} petitions with no signatures within {} days", table.excluded.len(), args.common.horizon);
    println!("wrote {} and {}", txt.display(), js.display());
    Ok(())
}

pub fn curves(args: &DataArgs, config: &RunConfig) -> CliResult<()> {
    let loaded = load(args)?;
    let ds = &loaded.dataset;
    let period: Period = args.period.into();
    let bins = match period {
        Period::Day => args.common.horizon,
        Period::Hour => args.common.horizon * 24,
    };
    let per: Vec<(bool, AdoptionSeries)> = ds
        .petitions
        .par_iter()
        .map(|(id, rec)| {
            let s = petition_pulse::timeline::bin_events(ds.events(id), rec.created, period, bins).map(|b| b.series);
            s.map(|s| (classify_success(rec, args.cutoff), s))
        })
        .collect::<Result<_, _>>()?;

    let out = OutDir::create(config)?;
    let cols = header(&["group", "period", "petitions", "signatures", "mean_signatures", "mean_cumulative_share"]);
    let curves = out.write_csv("curves.csv", &cols, |w| {
        for (group, keep) in [("all", None), ("successful", Some(true)), ("unsuccessful", Some(false))] {
            let members: Vec<&AdoptionSeries> =
                per.iter().filter(|(s, _)| keep.is_none_or(|k| k == *s)).map(|(_, s)| s).collect();
            let with_total: Vec<&AdoptionSeries> = members.iter().copied().filter(|s| s.total() > 0).collect();
            let mut cumulative = vec![0u64; with_total.len()];
            for i in 1..=bins {
                let sum: u64 = members.iter().map(|s| s.at(i)).sum();
                let mut share = 0.0;
                for (c, s) in cumulative.iter_mut().zip(&with_total) {
                    *c += s.at(i);
                    share += *c as f64 / s.total() as f64;
                }
                let n = members.len();
                w.write_record([
                    group.to_string(),
                    i.to_string(),
                    n.to_string(),
                    sum.to_string(),
                    num((n > 0).then(|| sum as f64 / n as f64)),
                    num((!with_total.is_empty()).then(|| share / with_total.len() as f64)),
                ])?;
            }
        }
        Ok(())
    })?;

    let daily: Vec<AdoptionSeries> = if period == Period::Day {
        per.into_iter().map(|(_, s)| s).collect()
    } else {
        per.into_iter().map(|(_, s)| s.aggregate(24, Period::Day)).collect::<Result<_, _>>()?
    };
    let with_signatures = daily.iter().filter(|s| s.total() > 0);
    let profile = peak_day_profile(with_signatures)?;
    let prof = out.write_csv("peak_profile.csv", &header(&["day", "mean_total", "petition_count"]), |w| {
        for r in &profile {
            w.write_record([r.day.to_string(), num(Some(r.mean_total)), r.petition_count.to_string()])?;
        }
        Ok(())
    })?;
    println!("wrote {} and {}", curves.display(), prof.display());
    Ok(())
}

pub fn geo(args: &DataArgs, config: &RunConfig) -> CliResult<()> {
    let loaded = load(args)?;
    let Some(table) = &loaded.centroids else {
        return Err(CliError::Config("geo needs --centroids".into()));
    };
    let ds = &loaded.dataset;
    let out = OutDir::create(config)?;
    let cols = header(&["petition_id", "success", "mean_km", "pairs_used", "pairs_skipped"]);
    let rows: Vec<[String; 5]> = ds
        .petitions
        .par_iter()
        .map(|(id, rec)| {
            let events = ds.events(id);
            let (mean, used, skipped) = match adjacent_pair_mean_distance(events, table) {
                Ok(d) => (Some(d.mean_km), d.pairs_used, d.pairs_skipped),
                Err(_) => (None, 0, events.len().saturating_sub(1)),
            };
            [
                id.clone(),
                classify_success(rec, args.cutoff).to_string(),
                num(mean),
                used.to_string(),
                skipped.to_string(),
            ]
        })
        .collect();
    let path = out.write_csv("geo.csv", &cols, |w| {
        for r in &rows {
            w.write_record(r)?;
        }
        Ok(())
    })?;
    let usable = rows.iter().filter(|r| !r[2].is_empty()).count();
    println!("{usable} of {} petitions have at least one usable Zipcode pair (exploratory)", rows.len());
    println!("wrote {}", path.display());
    Ok(())
}
