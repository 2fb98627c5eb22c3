//! Signature events, petition records and their binned adoption series.
//!
//! Bins are fixed-width windows measured from the petition's creation
//! timestamp. Bin `i` (1-based) covers offsets `[(i-1)W, iW)` where `W` is
//! 86 400 s for days and 3 600 s for hours.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: i64 = 86_400;
pub const SECONDS_PER_HOUR: i64 = 3_600;
pub const DEFAULT_DAY_HORIZON: usize = 60;
pub const DEFAULT_HOUR_HORIZON: usize = DEFAULT_DAY_HORIZON * 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Day,
    Hour,
}

impl Period {
    pub fn width_seconds(self) -> i64 {
        match self {
            Period::Day => SECONDS_PER_DAY,
            Period::Hour => SECONDS_PER_HOUR,
        }
    }

    pub fn default_horizon(self) -> usize {
        match self {
            Period::Day => DEFAULT_DAY_HORIZON,
            Period::Hour => DEFAULT_HOUR_HORIZON,
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "day" | "daily" => Ok(Period::Day),
            "hour" | "hourly" => Ok(Period::Hour),
            other => Err(Error::InvalidParameter(format!("unknown period `{other}`"))),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Period::Day => "day",
            Period::Hour => "hour",
        })
    }
}

/// A US Zipcode: exactly five ASCII digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Zipcode([u8; 5]);

impl Zipcode {
    /// Normalizes raw input: surrounding whitespace is stripped and anything
    /// that is not exactly five digits yields `None`.
    pub fn parse(raw: &str) -> Option<Zipcode> {
        let bytes = raw.trim().as_bytes();
        if bytes.len() != 5 || !bytes.iter().all(u8::is_ascii_digit) {
            return None;
        }
        let mut digits = [0u8; 5];
        digits.copy_from_slice(bytes);
        Some(Zipcode(digits))
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII digits are ever stored.
        std::str::from_utf8(&self.0).expect("zipcode is ascii")
    }
}

impl fmt::Display for Zipcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Zipcode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Zipcode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Zipcode::parse(&raw).ok_or_else(|| serde::de::Error::custom("zipcode must be 5 digits"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureEvent {
    pub petition_id: String,
    pub signature_id: String,
    /// Unix seconds.
    pub timestamp: i64,
    pub zipcode: Option<Zipcode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Open,
    PendingResponse,
    Responded,
    Closed,
    Unknown,
}

impl Status {
    /// Lenient parse; anything unrecognized maps to [`Status::Unknown`].
    pub fn parse(raw: &str) -> Status {
        let norm: String =
            raw.trim().chars().map(|c| if c == ' ' || c == '-' { '_' } else { c.to_ascii_lowercase() }).collect();
        match norm.as_str() {
            "open" => Status::Open,
            "pending_response" | "pending" => Status::PendingResponse,
            "responded" => Status::Responded,
            "closed" => Status::Closed,
            _ => Status::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Open => "open",
            Status::PendingResponse => "pending_response",
            Status::Responded => "responded",
            Status::Closed => "closed",
            Status::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetitionRecord {
    pub petition_id: String,
    pub title: String,
    pub description: String,
    pub signature_count: u64,
    pub status: Status,
    /// Unix seconds.
    pub created: i64,
}

/// Signature counts per period, `S(1)..S(T)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionSeries {
    pub petition_id: String,
    pub period: Period,
    counts: Vec<u64>,
}

impl AdoptionSeries {
    pub fn new(petition_id: impl Into<String>, period: Period, counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::contract("adoption series needs a horizon of at least one period"));
        }
        Ok(AdoptionSeries { petition_id: petition_id.into(), period, counts })
    }

    /// Anonymous daily series, mostly for tests and simulation output.
    pub fn daily(counts: Vec<u64>) -> Result<Self> {
        AdoptionSeries::new("", Period::Day, counts)
    }

    pub fn horizon(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `S(i)` with 1-based indexing; out-of-range periods read as zero.
    pub fn at(&self, i: usize) -> u64 {
        if i == 0 {
            0
        } else {
            self.counts.get(i - 1).copied().unwrap_or(0)
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Keeps periods `1..=last_period`.
    pub fn truncate(&self, last_period: usize) -> Result<AdoptionSeries> {
        if last_period == 0 || last_period > self.horizon() {
            return Err(Error::Range {
                what: "last_period",
                value: last_period as i64,
                min: 1,
                max: self.horizon() as i64,
            });
        }
        Ok(AdoptionSeries {
            petition_id: self.petition_id.clone(),
            period: self.period,
            counts: self.counts[..last_period].to_vec(),
        })
    }

    /// Sums consecutive groups of `factor` bins, e.g. 24 hourly bins into a day.
    pub fn aggregate(&self, factor: usize, period: Period) -> Result<AdoptionSeries> {
        if factor == 0 || !self.horizon().is_multiple_of(factor) {
            return Err(Error::contract(format!("horizon {} is not a multiple of {factor}", self.horizon())));
        }
        let counts = self.counts.chunks(factor).map(|c| c.iter().sum()).collect();
        AdoptionSeries::new(self.petition_id.clone(), period, counts)
    }
}

/// `S(1)+…+S(T)`.
pub fn series_total(series: &AdoptionSeries) -> u64 {
    series.total()
}

pub fn truncate(series: &AdoptionSeries, last_period: usize) -> Result<AdoptionSeries> {
    series.truncate(last_period)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinnedSeries {
    pub series: AdoptionSeries,
    /// Events at or beyond the horizon.
    pub dropped_late: usize,
    /// Events stamped before creation.
    pub rejected_early: usize,
}

impl BinnedSeries {
    pub fn binned(&self) -> usize {
        self.series.total() as usize
    }
}

/// Bins `events` by offset from `created`. Never fails on bad events; they
/// are tallied in the returned [`BinnedSeries`].
pub fn bin_events<'a, I>(events: I, created: i64, period: Period, horizon: usize) -> Result<BinnedSeries>
where
    I: IntoIterator<Item = &'a SignatureEvent>,
{
    if horizon == 0 {
        return Err(Error::contract("horizon must be at least 1"));
    }
    let width = period.width_seconds();
    let mut counts = vec![0u64; horizon];
    let mut dropped_late = 0;
    let mut rejected_early = 0;
    let mut petition_id = None;
    for event in events {
        if petition_id.is_none() {
            petition_id = Some(event.petition_id.clone());
        }
        let offset = event.timestamp - created;
        if offset < 0 {
            rejected_early += 1;
            continue;
        }
        let bin = (offset / width) as usize;
        match counts.get_mut(bin) {
            Some(c) => *c += 1,
            None => dropped_late += 1,
        }
    }
    Ok(BinnedSeries {
        series: AdoptionSeries::new(petition_id.unwrap_or_default(), period, counts)?,
        dropped_late,
        rejected_early,
    })
}
