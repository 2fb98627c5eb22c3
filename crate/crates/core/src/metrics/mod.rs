//! Per-petition virality and broadcast measures.

mod geo;
mod peaks;
mod shape;
mod threshold;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use geo::{adjacent_pair_mean_distance, haversine_km, CentroidTable, LatLon, PairDistance, EARTH_RADIUS_KM};
pub use peaks::{fdsd, find_peaks, gpo_exceed_ratio, num_local_peaks, total_exceed_ratio, PeakSet};
pub use shape::{shape_moments, ShapeMoments};
pub use threshold::{
    classify_success, deadline_stat, goal_gradient_stat, success_threshold, DropRatio, ThresholdStat,
    DEFAULT_REGIME_CUTOFF, EARLY_SUCCESS_THRESHOLD, RESPONSE_DEADLINE_DAYS, SUCCESS_THRESHOLD,
};

use crate::error::{Error, Result};
use crate::timeline::{AdoptionSeries, Period};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakDayRow {
    pub day: usize,
    pub mean_total: f64,
    pub petition_count: usize,
}

/// Mean total signatures of petitions grouped by their global-peak day.
/// Days no petition peaks on are left out.
pub fn peak_day_profile<'a, I>(dataset: I) -> Result<Vec<PeakDayRow>>
where
    I: IntoIterator<Item = &'a AdoptionSeries>,
{
    let mut groups: BTreeMap<usize, (u64, usize)> = BTreeMap::new();
    let mut horizon = None;
    for series in dataset {
        if series.period != Period::Day {
            return Err(Error::contract("peak-day profile needs daily series"));
        }
        match horizon {
            None => horizon = Some(series.horizon()),
            Some(h) if h != series.horizon() => return Err(Error::contract("peak-day profile needs a common horizon")),
            _ => {}
        }
        let g = groups.entry(find_peaks(series).global_peak).or_default();
        g.0 += series.total();
        g.1 += 1;
    }
    Ok(groups
        .into_iter()
        .map(|(day, (sum, count))| PeakDayRow { day, mean_total: sum as f64 / count as f64, petition_count: count })
        .collect())
}

/// Every per-petition measure of a daily series (and optionally its hourly
/// counterpart) in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetitionMetrics {
    pub total: u64,
    pub e_tot_daily: f64,
    pub e_tot_hourly: Option<f64>,
    pub e_gpo: f64,
    pub fdsd: bool,
    pub global_peak_day: usize,
    pub num_local_peaks: usize,
    pub shape: ShapeMoments,
}

impl PetitionMetrics {
    pub fn compute(daily: &AdoptionSeries, hourly: Option<&AdoptionSeries>) -> Result<PetitionMetrics> {
        let peaks = find_peaks(daily);
        Ok(PetitionMetrics {
            total: daily.total(),
            e_tot_daily: total_exceed_ratio(daily)?,
            e_tot_hourly: hourly.map(total_exceed_ratio).transpose()?,
            e_gpo: gpo_exceed_ratio(daily)?,
            fdsd: fdsd(daily)?,
            global_peak_day: peaks.global_peak,
            num_local_peaks: peaks.len(),
            shape: shape_moments(daily)?,
        })
    }
}
