//! CSV ingestion of archived petitions, signatures and Zipcode centroids.
//!
//! Columns are located by header name (case-insensitive, in any order), so
//! files with extra columns or a different layout load unchanged. Row-level
//! problems never abort a load; they are tallied in [`Diagnostics`].

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{CentroidTable, LatLon};
use crate::timeline::{bin_events, BinnedSeries, Period, PetitionRecord, SignatureEvent, Status, Zipcode};

/// At most this many individual row issues are kept; counts are always exact.
pub const MAX_RECORDED_ISSUES: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIssue {
    pub file: String,
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub petition_rows: u64,
    pub signature_rows: u64,
    pub centroid_rows: u64,
    pub rejected_rows: u64,
    pub duplicate_petitions: u64,
    pub duplicate_centroids: u64,
    pub orphan_signatures: u64,
    pub early_timestamp_events: u64,
    pub petitions_without_signatures: u64,
    pub issues: Vec<RowIssue>,
}

impl Diagnostics {
    fn reject(&mut self, file: &Path, line: u64, reason: impl Into<String>) {
        self.rejected_rows += 1;
        if self.issues.len() < MAX_RECORDED_ISSUES {
            self.issues.push(RowIssue { file: file.display().to_string(), line, reason: reason.into() });
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn open(path: &Path) -> Result<csv::Reader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| Error::Load { path: path.to_path_buf(), reason: e.to_string() })?;
    Ok(reader_from(BufReader::with_capacity(1 << 20, file)))
}

fn reader_from<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::Headers).from_reader(r)
}

/// Column positions resolved from a header row.
struct Columns {
    index: HashMap<&'static str, usize>,
}

impl Columns {
    fn resolve(
        path: &Path,
        headers: &csv::StringRecord,
        required: &[(&'static str, &[&str])],
        optional: &[(&'static str, &[&str])],
    ) -> Result<Columns> {
        let lowered: Vec<String> =
            headers.iter().map(|h| h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase()).collect();
        let find = |aliases: &[&str]| lowered.iter().position(|h| aliases.contains(&h.as_str()));
        let mut index = HashMap::new();
        for (name, aliases) in required {
            match find(aliases) {
                Some(i) => {
                    index.insert(*name, i);
                }
                None => {
                    return Err(Error::Load {
                        path: path.to_path_buf(),
                        reason: format!("missing required column `{name}`"),
                    })
                }
            }
        }
        for (name, aliases) in optional {
            if let Some(i) = find(aliases) {
                index.insert(*name, i);
            }
        }
        Ok(Columns { index })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, name: &str) -> Option<&'r str> {
        self.index.get(name).and_then(|&i| record.get(i))
    }
}

const PETITION_REQUIRED: &[(&str, &[&str])] = &[
    ("petition_id", &["petition_id", "id"]),
    ("signature_count", &["signature_count", "signaturecount", "signatures"]),
    ("created", &["created", "created_at", "timestamp"]),
];
const PETITION_OPTIONAL: &[(&str, &[&str])] =
    &[("title", &["title"]), ("description", &["description", "body"]), ("status", &["status", "signature_status"])];
const SIGNATURE_REQUIRED: &[(&str, &[&str])] = &[
    ("petition_id", &["petition_id", "petition"]),
    ("signature_id", &["signature_id", "id"]),
    ("timestamp", &["timestamp", "created"]),
];
const SIGNATURE_OPTIONAL: &[(&str, &[&str])] = &[("zipcode", &["zipcode", "zip"])];
const CENTROID_REQUIRED: &[(&str, &[&str])] =
    &[("zipcode", &["zipcode", "zip"]), ("lat", &["lat", "latitude"]), ("lon", &["lon", "lng", "longitude"])];

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_timestamp(raw: Option<&str>) -> std::result::Result<i64, String> {
    let raw = raw.map(str::trim).unwrap_or_default();
    let ts: i64 = raw.parse().map_err(|_| format!("unparseable timestamp `{raw}`"))?;
    if ts < 0 {
        return Err(format!("negative timestamp {ts}"));
    }
    Ok(ts)
}

fn nonempty_id(raw: Option<&str>, what: &str) -> std::result::Result<String, String> {
    match raw.map(str::trim) {
        Some(id) if !id.is_empty() => Ok(id.to_string()),
        _ => Err(format!("missing {what}")),
    }
}

fn parse_petition(cols: &Columns, rec: &csv::StringRecord) -> std::result::Result<PetitionRecord, String> {
    let petition_id = nonempty_id(cols.get(rec, "petition_id"), "petition_id")?;
    let raw_count = cols.get(rec, "signature_count").map(str::trim).unwrap_or_default();
    let signature_count = raw_count.parse().map_err(|_| format!("unparseable signature_count `{raw_count}`"))?;
    let created = parse_timestamp(cols.get(rec, "created"))?;
    Ok(PetitionRecord {
        petition_id,
        title: cols.get(rec, "title").unwrap_or_default().to_string(),
        description: cols.get(rec, "description").unwrap_or_default().to_string(),
        signature_count,
        status: cols.get(rec, "status").map_or(Status::Unknown, Status::parse),
        created,
    })
}

pub fn load_petitions(path: impl AsRef<Path>, diagnostics: &mut Diagnostics) -> Result<Vec<PetitionRecord>> {
    let path = path.as_ref();
    let mut reader = open(path)?;
    let cols = Columns::resolve(path, reader.headers()?, PETITION_REQUIRED, PETITION_OPTIONAL)?;
    let mut out = Vec::new();
    for row in reader.records() {
        diagnostics.petition_rows += 1;
        match row {
            Ok(rec) => match parse_petition(&cols, &rec) {
                Ok(p) => out.push(p),
                Err(reason) => diagnostics.reject(path, line_of(&rec), reason),
            },
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                diagnostics.reject(path, line, e.to_string());
            }
        }
    }
    Ok(out)
}

fn parse_signature(cols: &Columns, rec: &csv::StringRecord) -> std::result::Result<SignatureEvent, String> {
    Ok(SignatureEvent {
        petition_id: nonempty_id(cols.get(rec, "petition_id"), "petition_id")?,
        signature_id: nonempty_id(cols.get(rec, "signature_id"), "signature_id")?,
        timestamp: parse_timestamp(cols.get(rec, "timestamp"))?,
        zipcode: cols.get(rec, "zipcode").and_then(Zipcode::parse),
    })
}

/// Streams the signature file row by row, handing each valid event to `sink`.
/// Memory use is independent of file size.
pub fn for_each_signature<F>(path: impl AsRef<Path>, diagnostics: &mut Diagnostics, mut sink: F) -> Result<()>
where
    F: FnMut(SignatureEvent),
{
    let path = path.as_ref();
    let mut reader = open(path)?;
    let cols = Columns::resolve(path, reader.headers()?, SIGNATURE_REQUIRED, SIGNATURE_OPTIONAL)?;
    let mut rec = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut rec) {
            Ok(false) => break,
            Ok(true) => {
                diagnostics.signature_rows += 1;
                match parse_signature(&cols, &rec) {
                    Ok(ev) => sink(ev),
                    Err(reason) => diagnostics.reject(path, line_of(&rec), reason),
                }
            }
            Err(e) => {
                diagnostics.signature_rows += 1;
                let line = e.position().map_or(0, |p| p.line());
                diagnostics.reject(path, line, e.to_string());
                if !matches!(e.kind(), csv::ErrorKind::Utf8 { .. } | csv::ErrorKind::UnequalLengths { .. }) {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

pub fn load_signatures(path: impl AsRef<Path>, diagnostics: &mut Diagnostics) -> Result<Vec<SignatureEvent>> {
    let mut out = Vec::new();
    for_each_signature(path, diagnostics, |ev| out.push(ev))?;
    Ok(out)
}

pub fn load_centroids(path: impl AsRef<Path>, diagnostics: &mut Diagnostics) -> Result<CentroidTable> {
    let path = path.as_ref();
    let mut reader = open(path)?;
    let cols = Columns::resolve(path, reader.headers()?, CENTROID_REQUIRED, &[])?;
    let mut table = CentroidTable::new();
    for row in reader.records() {
        diagnostics.centroid_rows += 1;
        let rec = match row {
            Ok(rec) => rec,
            Err(e) => {
                diagnostics.reject(path, e.position().map_or(0, |p| p.line()), e.to_string());
                continue;
            }
        };
        let parsed = (|| {
            let raw_zip = cols.get(&rec, "zipcode").unwrap_or_default();
            let zip = Zipcode::parse(raw_zip).ok_or_else(|| format!("invalid zipcode `{raw_zip}`"))?;
            let coord = |name: &str, limit: f64| -> std::result::Result<f64, String> {
                let raw = cols.get(&rec, name).map(str::trim).unwrap_or_default();
                let v: f64 = raw.parse().map_err(|_| format!("unparseable {name} `{raw}`"))?;
                if !v.is_finite() || v.abs() > limit {
                    return Err(format!("{name} {v} out of range"));
                }
                Ok(v)
            };
            Ok::<_, String>((zip, LatLon::new(coord("lat", 90.0)?, coord("lon", 180.0)?)))
        })();
        match parsed {
            Ok((zip, at)) => {
                if table.insert(zip, at).is_some() {
                    diagnostics.duplicate_centroids += 1;
                }
            }
            Err(reason) => diagnostics.reject(path, line_of(&rec), reason),
        }
    }
    Ok(table)
}

/// Petitions joined with their time-ordered signatures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub petitions: BTreeMap<String, PetitionRecord>,
    pub signatures: BTreeMap<String, Vec<SignatureEvent>>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub petitions: usize,
    pub signatures: usize,
    pub orphan_signatures: u64,
    pub petitions_without_signatures: u64,
}

/// Joins on `petition_id`. Signatures of unknown petitions are dropped and
/// tallied; each petition's events are stably sorted by timestamp.
pub fn assemble(
    petitions: Vec<PetitionRecord>,
    signatures: impl IntoIterator<Item = SignatureEvent>,
    mut diagnostics: Diagnostics,
) -> Dataset {
    let mut by_id = BTreeMap::new();
    for p in petitions {
        if by_id.contains_key(&p.petition_id) {
            diagnostics.duplicate_petitions += 1;
            continue;
        }
        by_id.insert(p.petition_id.clone(), p);
    }
    let mut grouped: BTreeMap<String, Vec<SignatureEvent>> = BTreeMap::new();
    for ev in signatures {
        match by_id.get(&ev.petition_id) {
            Some(p) => {
                if ev.timestamp < p.created {
                    diagnostics.early_timestamp_events += 1;
                }
                grouped.entry(ev.petition_id.clone()).or_default().push(ev);
            }
            None => diagnostics.orphan_signatures += 1,
        }
    }
    for events in grouped.values_mut() {
        events.sort_by_key(|e| e.timestamp);
    }
    diagnostics.petitions_without_signatures = by_id.keys().filter(|id| !grouped.contains_key(*id)).count() as u64;
    Dataset { petitions: by_id, signatures: grouped, diagnostics }
}

impl Dataset {
    /// Loads and assembles a petitions file and a signatures file.
    pub fn load(petitions: impl AsRef<Path>, signatures: impl AsRef<Path>) -> Result<Dataset> {
        let mut diagnostics = Diagnostics::default();
        let petitions = load_petitions(petitions, &mut diagnostics)?;
        let signatures = load_signatures(signatures, &mut diagnostics)?;
        Ok(assemble(petitions, signatures, diagnostics))
    }

    pub fn summary(&self) -> DatasetSummary {
        DatasetSummary {
            petitions: self.petitions.len(),
            signatures: self.signatures.values().map(Vec::len).sum(),
            orphan_signatures: self.diagnostics.orphan_signatures,
            petitions_without_signatures: self.diagnostics.petitions_without_signatures,
        }
    }

    pub fn events(&self, petition_id: &str) -> &[SignatureEvent] {
        self.signatures.get(petition_id).map_or(&[], Vec::as_slice)
    }

    /// Binned series of one petition, `None` for an unknown id.
    pub fn series(&self, petition_id: &str, period: Period, horizon: usize) -> Option<Result<BinnedSeries>> {
        let record = self.petitions.get(petition_id)?;
        Some(bin_events(self.events(petition_id), record.created, period, horizon).map(|mut b| {
            b.series.petition_id = petition_id.to_string();
            b
        }))
    }

    pub fn write_petitions<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["petition_id", "title", "description", "signature_count", "status", "created"])?;
        for p in self.petitions.values() {
            w.write_record([
                p.petition_id.as_str(),
                &p.title,
                &p.description,
                &p.signature_count.to_string(),
                p.status.as_str(),
                &p.created.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_signatures<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["petition_id", "signature_id", "timestamp", "zipcode"])?;
        for ev in self.signatures.values().flatten() {
            w.write_record([
                ev.petition_id.as_str(),
                &ev.signature_id,
                &ev.timestamp.to_string(),
                ev.zipcode.as_ref().map_or("", Zipcode::as_str),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `petitions.csv` and `signatures.csv` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        let p = dir.join("petitions.csv");
        let s = dir.join("signatures.csv");
        self.write_petitions(BufWriter::new(File::create(&p)?))?;
        self.write_signatures(BufWriter::new(File::create(&s)?))?;
        Ok((p, s))
    }
}
