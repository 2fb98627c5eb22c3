//! Exploratory geographic probe: mean great-circle distance between the
//! Zipcodes of consecutive signers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeline::{SignatureEvent, Zipcode};

/// Mean Earth radius (IUGG), km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }
}

pub fn haversine_km(a: LatLon, b: LatLon) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Zipcode centroids. Read-only once built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CentroidTable {
    entries: HashMap<Zipcode, LatLon>,
}

impl CentroidTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous centroid if the Zipcode was already present.
    pub fn insert(&mut self, zip: Zipcode, at: LatLon) -> Option<LatLon> {
        self.entries.insert(zip, at)
    }

    pub fn get(&self, zip: &Zipcode) -> Option<LatLon> {
        self.entries.get(zip).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(Zipcode, LatLon)> for CentroidTable {
    fn from_iter<I: IntoIterator<Item = (Zipcode, LatLon)>>(iter: I) -> Self {
        CentroidTable { entries: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub mean_km: f64,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
}

/// Each consecutive pair is judged on its own: a pair is skipped when either
/// side lacks a known Zipcode, and the chain is not re-linked around it.
pub fn adjacent_pair_mean_distance(events: &[SignatureEvent], centroids: &CentroidTable) -> Result<PairDistance> {
    let locate = |e: &SignatureEvent| e.zipcode.as_ref().and_then(|z| centroids.get(z));
    let mut sum = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for pair in events.windows(2) {
        match (locate(&pair[0]), locate(&pair[1])) {
            (Some(a), Some(b)) => {
                sum += haversine_km(a, b);
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::UndefinedMetric("adjacent-pair distance"));
    }
    Ok(PairDistance { mean_km: sum / used as f64, pairs_used: used, pairs_skipped: skipped })
}
