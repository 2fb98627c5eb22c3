//! Success thresholds and the before/after signing-rate comparisons around them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeline::{AdoptionSeries, Period, PetitionRecord};

/// 2013-01-15T00:00:00Z. Petitions created earlier needed 25 000 signatures.
pub const DEFAULT_REGIME_CUTOFF: i64 = 1_358_208_000;
pub const EARLY_SUCCESS_THRESHOLD: u64 = 25_000;
pub const SUCCESS_THRESHOLD: u64 = 100_000;
/// Days a petition had to reach the response threshold.
pub const RESPONSE_DEADLINE_DAYS: usize = 30;

pub fn success_threshold(created: i64, regime_cutoff: i64) -> u64 {
    if created < regime_cutoff {
        EARLY_SUCCESS_THRESHOLD
    } else {
        SUCCESS_THRESHOLD
    }
}

pub fn classify_success(record: &PetitionRecord, regime_cutoff: i64) -> bool {
    record.signature_count >= success_threshold(record.created, regime_cutoff)
}

/// `post_mean / pre_mean`, with the zero-denominator cases kept apart from
/// ordinary ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DropRatio {
    Ratio(f64),
    /// Both windows empty of signatures; reported as 0.
    ZeroOverZero,
    /// Nothing before, something after.
    Unbounded,
    /// No crossing, or a window with no days in range.
    Undefined,
}

impl DropRatio {
    fn from_means(pre: f64, post: f64) -> DropRatio {
        match (pre == 0.0, post == 0.0) {
            (true, true) => DropRatio::ZeroOverZero,
            (true, false) => DropRatio::Unbounded,
            _ => DropRatio::Ratio(post / pre),
        }
    }

    /// Finite value usable in cohort summaries, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            DropRatio::Ratio(r) => Some(r),
            DropRatio::ZeroOverZero => Some(0.0),
            DropRatio::Unbounded | DropRatio::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStat {
    pub pre_mean: Option<f64>,
    pub post_mean: Option<f64>,
    pub drop_ratio: DropRatio,
    pub crossing_period: Option<usize>,
}

/// Mean of `S` over `[from, to] ∩ [1, T]`; `None` when the range is empty.
fn window_mean(series: &AdoptionSeries, from: i64, to: i64) -> Option<f64> {
    let lo = from.max(1);
    let hi = to.min(series.horizon() as i64);
    if lo > hi {
        return None;
    }
    let sum: u64 = (lo..=hi).map(|i| series.at(i as usize)).sum();
    Some(sum as f64 / (hi - lo + 1) as f64)
}

fn compare_around(pre: Option<f64>, post: Option<f64>, c: usize) -> ThresholdStat {
    let drop_ratio = match (pre, post) {
        (Some(a), Some(b)) => DropRatio::from_means(a, b),
        _ => DropRatio::Undefined,
    };
    ThresholdStat { pre_mean: pre, post_mean: post, drop_ratio, crossing_period: Some(c) }
}

fn require_daily(series: &AdoptionSeries) -> Result<()> {
    if series.period != Period::Day {
        return Err(Error::contract("threshold statistics need a daily series"));
    }
    Ok(())
}

/// Signing rate in the `window` days before vs. after the day the cumulative
/// count first reaches `threshold`. The crossing day itself is in neither.
pub fn goal_gradient_stat(series: &AdoptionSeries, threshold: u64, window: usize) -> Result<ThresholdStat> {
    require_daily(series)?;
    if threshold == 0 || window == 0 {
        return Err(Error::contract("threshold and window must be positive"));
    }
    let mut cumulative = 0u64;
    let crossing = series.counts().iter().position(|&c| {
        cumulative += c;
        cumulative >= threshold
    });
    let Some(pos) = crossing else {
        return Ok(ThresholdStat {
            pre_mean: None,
            post_mean: None,
            drop_ratio: DropRatio::Undefined,
            crossing_period: None,
        });
    };
    let c = pos + 1;
    let (ci, w) = (c as i64, window as i64);
    let pre = window_mean(series, ci - w, ci - 1);
    let post = window_mean(series, ci + 1, ci + w);
    Ok(compare_around(pre, post, c))
}

/// Signing rate over the `window` days up to and including `deadline_day`
/// vs. the `window` days after it.
pub fn deadline_stat(series: &AdoptionSeries, deadline_day: usize, window: usize) -> Result<ThresholdStat> {
    require_daily(series)?;
    if window == 0 || window > deadline_day {
        return Err(Error::Range { what: "window", value: window as i64, min: 1, max: deadline_day as i64 });
    }
    if deadline_day + window > series.horizon() {
        return Err(Error::Range {
            what: "deadline_day + window",
            value: (deadline_day + window) as i64,
            min: 1,
            max: series.horizon() as i64,
        });
    }
    let (d, w) = (deadline_day as i64, window as i64);
    let pre = window_mean(series, d - w + 1, d);
    let post = window_mean(series, d + 1, d + w);
    Ok(compare_around(pre, post, deadline_day))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeline::Status;

    fn record(count: u64, created: i64) -> PetitionRecord {
        PetitionRecord {
            petition_id: "p".into(),
            title: String::new(),
            description: String::new(),
            signature_count: count,
            status: Status::Closed,
            created,
        }
    }

    const JAN_2012: i64 = 1_325_376_000;
    const JAN_2014: i64 = 1_388_534_400;

    #[test]
    fn success_regimes() {
        assert!(classify_success(&record(100_000, JAN_2014), DEFAULT_REGIME_CUTOFF));
        assert!(classify_success(&record(25_000, JAN_2012), DEFAULT_REGIME_CUTOFF));
        assert!(!classify_success(&record(99_999, JAN_2014), DEFAULT_REGIME_CUTOFF));
        assert!(!classify_success(&record(24_999, JAN_2012), DEFAULT_REGIME_CUTOFF));
        assert!(!classify_success(&record(25_000, DEFAULT_REGIME_CUTOFF), DEFAULT_REGIME_CUTOFF));
    }

    #[test]
    fn constant_series_crosses_on_day_20() {
        let s = AdoptionSeries::daily(vec![5000; 60]).unwrap();
        let st = goal_gradient_stat(&s, 100_000, 5).unwrap();
        assert_eq!(st.crossing_period, Some(20));
        assert_eq!(st.pre_mean, Some(5000.0));
        assert_eq!(st.post_mean, Some(5000.0));
        assert_eq!(st.drop_ratio, DropRatio::Ratio(1.0));
    }

    #[test]
    fn silence_after_crossing_is_zero_ratio() {
        let mut c = vec![0u64; 30];
        c[..5].fill(20_000);
        let st = goal_gradient_stat(&AdoptionSeries::daily(c).unwrap(), 100_000, 5).unwrap();
        assert_eq!(st.drop_ratio.value(), Some(0.0));
    }

    #[test]
    fn never_crossing_is_flagged() {
        let st = goal_gradient_stat(&AdoptionSeries::daily(vec![1; 60]).unwrap(), 100_000, 5).unwrap();
        assert_eq!(st.crossing_period, None);
        assert_eq!(st.drop_ratio, DropRatio::Undefined);
        assert_eq!(st.pre_mean, None);
    }

    #[test]
    fn zero_denominators() {
        // Crossing on day 3 with nothing before or after it.
        let s = AdoptionSeries::daily(vec![0, 0, 50, 0, 0]).unwrap();
        assert_eq!(goal_gradient_stat(&s, 10, 2).unwrap().drop_ratio, DropRatio::ZeroOverZero);
        let s = AdoptionSeries::daily(vec![0, 0, 50, 1, 0]).unwrap();
        assert_eq!(goal_gradient_stat(&s, 10, 2).unwrap().drop_ratio, DropRatio::Unbounded);
        // Crossing on day 1 leaves the pre-window empty.
        let s = AdoptionSeries::daily(vec![50, 1, 0]).unwrap();
        assert_eq!(goal_gradient_stat(&s, 10, 2).unwrap().drop_ratio, DropRatio::Undefined);
    }

    #[test]
    fn deadline_examples() {
        let s = AdoptionSeries::daily(vec![7; 60]).unwrap();
        assert_eq!(deadline_stat(&s, 30, 5).unwrap().drop_ratio, DropRatio::Ratio(1.0));

        let mut c = vec![3u64; 60];
        c[24..30].fill(10);
        c[30..36].fill(1);
        let st = deadline_stat(&AdoptionSeries::daily(c).unwrap(), 30, 6).unwrap();
        assert_eq!(st.pre_mean, Some(10.0));
        assert_eq!(st.post_mean, Some(1.0));
        assert_eq!(st.drop_ratio, DropRatio::Ratio(0.1));
        assert_eq!(st.crossing_period, Some(30));
    }

    #[test]
    fn deadline_window_overrun() {
        let s = AdoptionSeries::daily(vec![1; 33]).unwrap();
        assert!(matches!(deadline_stat(&s, 30, 5), Err(Error::Range { .. })));
        assert!(deadline_stat(&s, 30, 3).is_ok());
        assert!(matches!(deadline_stat(&s, 2, 3), Err(Error::Range { .. })));
    }
}
