//! Temporal peaks and the exceed ratios built on them.
//!
//! A period is a peak when its count strictly exceeds both neighbours, with
//! periods outside the series read as zero. A day-1 spike therefore counts,
//! and plateaus never do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeline::{AdoptionSeries, Period};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakSet {
    /// 1-based, ascending.
    pub indices: Vec<usize>,
    /// Earliest period attaining the maximum count.
    pub global_peak: usize,
    pub global_peak_count: u64,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `S(i) - max(S(i-1), S(i+1))`, signed.
fn excess_over_neighbours(series: &AdoptionSeries, i: usize) -> i128 {
    let left = series.at(i - 1);
    let right = series.at(i + 1);
    series.at(i) as i128 - left.max(right) as i128
}

pub fn find_peaks(series: &AdoptionSeries) -> PeakSet {
    let counts = series.counts();
    let mut indices = Vec::new();
    let mut global_peak = 1;
    let mut global_peak_count = 0;
    for (pos, &c) in counts.iter().enumerate() {
        let i = pos + 1;
        if excess_over_neighbours(series, i) > 0 {
            indices.push(i);
        }
        if c > global_peak_count {
            global_peak = i;
            global_peak_count = c;
        }
    }
    PeakSet { indices, global_peak, global_peak_count }
}

pub fn num_local_peaks(series: &AdoptionSeries) -> usize {
    find_peaks(series).len()
}

fn nonzero_total(series: &AdoptionSeries, metric: &'static str) -> Result<u64> {
    match series.total() {
        0 => Err(Error::UndefinedMetric(metric)),
        t => Ok(t),
    }
}

/// Sum of every peak's excess over its larger neighbour, divided by the total.
pub fn total_exceed_ratio(series: &AdoptionSeries) -> Result<f64> {
    let total = nonzero_total(series, "total exceed ratio")?;
    let excess: i128 = find_peaks(series).indices.iter().map(|&i| excess_over_neighbours(series, i)).sum();
    Ok(excess as f64 / total as f64)
}

/// Excess of the global peak alone, zero when the global peak sits on a plateau.
pub fn gpo_exceed_ratio(series: &AdoptionSeries) -> Result<f64> {
    let total = nonzero_total(series, "global-peak exceed ratio")?;
    let g = find_peaks(series).global_peak;
    let excess = excess_over_neighbours(series, g).max(0);
    Ok(excess as f64 / total as f64)
}

/// Whether day 2 strictly out-signs day 1.
pub fn fdsd(series: &AdoptionSeries) -> Result<bool> {
    if series.period != Period::Day {
        return Err(Error::contract("first-day/second-day comparison needs a daily series"));
    }
    if series.horizon() < 2 {
        return Err(Error::contract("first-day/second-day comparison needs at least two days"));
    }
    Ok(series.at(2) > series.at(1))
}
