//! Meet-result ingestion: CSV parsing with per-row error capture,
//! operator bodyweight overrides, weight-class assignment, and the
//! selection pipeline that turns a result dump into a fit sample.
//!
//! Selection runs in a fixed stage order: sex, equipment, event, one
//! best result per lifter, class assignment, top-N per class, and
//! finally the bodyweight window (anchor rows are exempt from the
//! window but must earn their top-N place like everyone else). Every
//! input entry ends up either in the sample or in the exclusion log
//! with the reason from the stage that dropped it.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Sex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Equipment {
    Raw,
    Wraps,
}

impl Equipment {
    pub fn parse(s: &str) -> Option<Equipment> {
        match s {
            "Raw" => Some(Equipment::Raw),
            "Wraps" => Some(Equipment::Wraps),
            _ => None,
        }
    }
}

impl fmt::Display for Equipment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equipment::Raw => "Raw",
            Equipment::Wraps => "Wraps",
        })
    }
}

/// One competition result. The lifter's name is the identity key:
/// results sharing a name are treated as the same lifter.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub lifter_id: String,
    pub sex: Sex,
    pub equipment: Equipment,
    pub event: String,
    pub bodyweight_kg: f64,
    pub total_kg: f64,
    pub date: NaiveDate,
    pub meet_name: Option<String>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("filter config error: {0}")]
    Config(String),
    #[error("overrides file error: {0}")]
    Overrides(String),
    #[error("nothing to fit: selection produced an empty sample")]
    EmptySample,
}

/// A data row that could not be used, with its 1-based line number in
/// the source file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub line_no: u64,
    pub reason: String,
}

/// A row that was valid except for a blank bodyweight. It is parked
/// here (and counted as a row error) until an override supplies the
/// missing weigh-in.
#[derive(Debug, Clone)]
pub struct PendingRow {
    pub line_no: u64,
    pub lifter_id: String,
    pub sex: Sex,
    pub equipment: Equipment,
    pub event: String,
    pub total_kg: f64,
    pub date: NaiveDate,
    pub meet_name: Option<String>,
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub entries: Vec<Entry>,
    pub row_errors: Vec<RowError>,
    pub pending: Vec<PendingRow>,
}

const COL_NAME: &str = "Name";
const COL_SEX: &str = "Sex";
const COL_EQUIPMENT: &str = "Equipment";
const COL_BODYWEIGHT: &str = "BodyweightKg";
const COL_TOTAL: &str = "TotalKg";
const COL_DATE: &str = "Date";
const COL_EVENT: &str = "Event";
const COL_MEET: &str = "MeetName";

struct Columns {
    name: usize,
    sex: usize,
    equipment: usize,
    bodyweight: usize,
    total: usize,
    date: usize,
    event: usize,
    meet: Option<usize>,
}

fn locate_columns(headers: &csv::StringRecord) -> Result<Columns, IngestError> {
    let find = |col: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| IngestError::MissingColumn(col.to_string()))
    };
    Ok(Columns {
        name: find(COL_NAME)?,
        sex: find(COL_SEX)?,
        equipment: find(COL_EQUIPMENT)?,
        bodyweight: find(COL_BODYWEIGHT)?,
        total: find(COL_TOTAL)?,
        date: find(COL_DATE)?,
        event: find(COL_EVENT)?,
        meet: headers.iter().position(|h| h == COL_MEET),
    })
}

fn parse_positive(field: &str, what: &str) -> Result<f64, String> {
    let value: f64 = field
        .parse()
        .map_err(|_| format!("non-numeric {what} {field:?}"))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(format!("non-positive {what} {field:?}"));
    }
    Ok(value)
}

/// Parses a result CSV. Required columns: Name, Sex, Equipment,
/// BodyweightKg, TotalKg, Date, Event; MeetName is used when present
/// and all other columns are ignored. A missing required column is
/// fatal; anything wrong with an individual row is recorded in
/// `row_errors` and parsing continues.
pub fn parse_entries<R: Read>(reader: R) -> Result<ParseOutcome, IngestError> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let columns = locate_columns(csv_reader.headers()?)?;

    let mut outcome = ParseOutcome::default();
    for result in csv_reader.records() {
        let record = result?;
        let line_no = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_record(&record, &columns) {
            Ok(Parsed::Entry(entry)) => outcome.entries.push(entry),
            Ok(Parsed::Pending(pending)) => {
                outcome.row_errors.push(RowError {
                    line_no,
                    reason: "missing bodyweight".to_string(),
                });
                outcome.pending.push(pending);
            }
            Err(reason) => outcome.row_errors.push(RowError { line_no, reason }),
        }
    }
    Ok(outcome)
}

enum Parsed {
    Entry(Entry),
    Pending(PendingRow),
}

fn parse_record(record: &csv::StringRecord, columns: &Columns) -> Result<Parsed, String> {
    let field = |idx: usize| record.get(idx).map(str::trim);
    let required = |idx: usize, col: &str| -> Result<&str, String> {
        field(idx).ok_or_else(|| format!("row too short, no {col} field"))
    };

    let name = required(columns.name, COL_NAME)?;
    if name.is_empty() {
        return Err("missing name".to_string());
    }
    let sex_field = required(columns.sex, COL_SEX)?;
    let sex = Sex::parse(sex_field).ok_or_else(|| format!("unrecognized sex {sex_field:?}"))?;
    let equipment_field = required(columns.equipment, COL_EQUIPMENT)?;
    let equipment = Equipment::parse(equipment_field)
        .ok_or_else(|| format!("unsupported equipment {equipment_field:?}"))?;
    let event = required(columns.event, COL_EVENT)?;
    if event.is_empty() {
        return Err("missing event".to_string());
    }
    let total_field = required(columns.total, COL_TOTAL)?;
    if total_field.is_empty() {
        return Err("missing total".to_string());
    }
    let total_kg = parse_positive(total_field, "total")?;
    let date_field = required(columns.date, COL_DATE)?;
    let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d")
        .map_err(|_| format!("invalid date {date_field:?}"))?;
    let meet_name = columns
        .meet
        .and_then(|idx| field(idx))
        .filter(|m| !m.is_empty())
        .map(str::to_string);

    // Bodyweight last: a blank here with everything else valid is the
    // one defect an override can repair later.
    let line_no = record.position().map(|p| p.line()).unwrap_or(0);
    let bw_field = required(columns.bodyweight, COL_BODYWEIGHT)?;
    if bw_field.is_empty() {
        return Ok(Parsed::Pending(PendingRow {
            line_no,
            lifter_id: name.to_string(),
            sex,
            equipment,
            event: event.to_string(),
            total_kg,
            date,
            meet_name,
        }));
    }
    let bodyweight_kg = parse_positive(bw_field, "bodyweight")?;

    Ok(Parsed::Entry(Entry {
        lifter_id: name.to_string(),
        sex,
        equipment,
        event: event.to_string(),
        bodyweight_kg,
        total_kg,
        date,
        meet_name,
    }))
}

pub fn read_entries(path: &Path) -> Result<ParseOutcome, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_entries(file)
}

/// One line of an operator-maintained overrides file. The note is
/// mandatory: every manual correction must say where the number came
/// from.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BodyweightOverride {
    pub lifter_id: String,
    pub meet_name: String,
    pub bodyweight_kg: f64,
    pub note: String,
}

/// Overrides are operator-authored configuration, so unlike result
/// data any defect here is fatal.
pub fn parse_overrides<R: Read>(reader: R) -> Result<Vec<BodyweightOverride>, IngestError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut overrides = Vec::new();
    for (i, result) in csv_reader.deserialize::<BodyweightOverride>().enumerate() {
        let row = result.map_err(|e| IngestError::Overrides(format!("row {}: {e}", i + 1)))?;
        if !(row.bodyweight_kg.is_finite() && row.bodyweight_kg > 0.0) {
            return Err(IngestError::Overrides(format!(
                "row {}: bodyweight_kg must be positive, got {}",
                i + 1,
                row.bodyweight_kg
            )));
        }
        if row.note.trim().is_empty() {
            return Err(IngestError::Overrides(format!(
                "row {}: note must not be empty",
                i + 1
            )));
        }
        overrides.push(row);
    }
    Ok(overrides)
}

pub fn read_overrides(path: &Path) -> Result<Vec<BodyweightOverride>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_overrides(file)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppliedOverride {
    pub lifter_id: String,
    pub meet_name: String,
    pub bodyweight_kg: f64,
    /// The bodyweight that was replaced; None when the row had none and
    /// the override completed it.
    pub replaced: Option<f64>,
    pub note: String,
}

#[derive(Debug, Default, PartialEq)]
pub struct OverrideReport {
    pub applied: Vec<AppliedOverride>,
    pub warnings: Vec<String>,
}

/// Applies overrides in file order. An override matches on lifter_id
/// and meet_name together; it rewrites the bodyweight of matching
/// entries and completes matching pending rows, whose original
/// missing-bodyweight row errors are withdrawn. An override that
/// matches nothing produces a warning, not an error.
pub fn apply_overrides(
    outcome: &mut ParseOutcome,
    overrides: &[BodyweightOverride],
) -> OverrideReport {
    let mut report = OverrideReport::default();
    for o in overrides {
        let matches = |lifter_id: &str, meet_name: Option<&str>| {
            lifter_id == o.lifter_id && meet_name == Some(o.meet_name.as_str())
        };
        let mut matched = false;

        for entry in outcome.entries.iter_mut() {
            if matches(&entry.lifter_id, entry.meet_name.as_deref()) {
                report.applied.push(AppliedOverride {
                    lifter_id: o.lifter_id.clone(),
                    meet_name: o.meet_name.clone(),
                    bodyweight_kg: o.bodyweight_kg,
                    replaced: Some(entry.bodyweight_kg),
                    note: o.note.clone(),
                });
                entry.bodyweight_kg = o.bodyweight_kg;
                matched = true;
            }
        }

        let mut i = 0;
        while i < outcome.pending.len() {
            if matches(
                &outcome.pending[i].lifter_id,
                outcome.pending[i].meet_name.as_deref(),
            ) {
                let p = outcome.pending.remove(i);
                outcome
                    .row_errors
                    .retain(|e| !(e.line_no == p.line_no && e.reason == "missing bodyweight"));
                outcome.entries.push(Entry {
                    lifter_id: p.lifter_id,
                    sex: p.sex,
                    equipment: p.equipment,
                    event: p.event,
                    bodyweight_kg: o.bodyweight_kg,
                    total_kg: p.total_kg,
                    date: p.date,
                    meet_name: p.meet_name,
                });
                report.applied.push(AppliedOverride {
                    lifter_id: o.lifter_id.clone(),
                    meet_name: o.meet_name.clone(),
                    bodyweight_kg: o.bodyweight_kg,
                    replaced: None,
                    note: o.note.clone(),
                });
                matched = true;
            } else {
                i += 1;
            }
        }

        if !matched {
            report.warnings.push(format!(
                "override for {:?} at {:?} matched no rows",
                o.lifter_id, o.meet_name
            ));
        }
    }
    report
}

fn validate_boundaries(boundaries: &[f64]) -> Result<(), IngestError> {
    if boundaries.is_empty() {
        return Err(IngestError::Config(
            "class_boundaries_kg must not be empty".to_string(),
        ));
    }
    for window in boundaries.windows(2) {
        if !(window[0] < window[1]) {
            return Err(IngestError::Config(format!(
                "class_boundaries_kg must be strictly ascending, got {} before {}",
                window[0], window[1]
            )));
        }
    }
    if boundaries.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(IngestError::Config(
            "class boundaries must be positive and finite".to_string(),
        ));
    }
    Ok(())
}

fn boundary_label(b: f64) -> String {
    // f64 Display prints the shortest exact form: 140 -> "140", 82.5 -> "82.5".
    format!("{b}")
}

/// Class label for a bodyweight: "-b" for the smallest boundary b with
/// bodyweight <= b, "+last" above the final boundary.
pub fn assign_weight_class(bodyweight_kg: f64, boundaries: &[f64]) -> Result<String, IngestError> {
    validate_boundaries(boundaries)?;
    Ok(class_of(bodyweight_kg, boundaries))
}

fn class_of(bodyweight_kg: f64, boundaries: &[f64]) -> String {
    for &b in boundaries {
        if bodyweight_kg <= b {
            return format!("-{}", boundary_label(b));
        }
    }
    format!("+{}", boundary_label(*boundaries.last().expect("validated non-empty")))
}

/// All class labels a boundary list produces, lightest first.
pub fn class_labels(boundaries: &[f64]) -> Vec<String> {
    let mut labels: Vec<String> = boundaries
        .iter()
        .map(|&b| format!("-{}", boundary_label(b)))
        .collect();
    if let Some(&last) = boundaries.last() {
        labels.push(format!("+{}", boundary_label(last)));
    }
    labels
}

/// Standard men's class boundaries. Note there is no 110 class: the
/// historical class list this library follows jumps from 100 to 120.
pub const DEFAULT_CLASS_BOUNDARIES_M: [f64; 12] = [
    44.0, 48.0, 52.0, 56.0, 60.0, 67.5, 75.0, 82.5, 90.0, 100.0, 120.0, 140.0,
];

/// Standard women's class boundaries; 90+ is the heaviest class.
pub const DEFAULT_CLASS_BOUNDARIES_F: [f64; 9] =
    [44.0, 48.0, 52.0, 56.0, 60.0, 67.5, 75.0, 82.5, 90.0];

/// The standard boundary list for a sex, for callers without a filter
/// config in hand.
pub fn default_class_boundaries(sex: Sex) -> &'static [f64] {
    match sex {
        Sex::M => &DEFAULT_CLASS_BOUNDARIES_M,
        Sex::F => &DEFAULT_CLASS_BOUNDARIES_F,
    }
}

fn default_equipment() -> Vec<Equipment> {
    vec![Equipment::Raw, Equipment::Wraps]
}

fn default_event() -> String {
    "SBD".to_string()
}

fn default_top_n() -> usize {
    10
}

/// Selection settings for building a fit sample. Unknown fields are
/// rejected so a typo cannot silently disable a filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub sex: Sex,
    #[serde(default = "default_equipment")]
    pub equipment_allowed: Vec<Equipment>,
    #[serde(default = "default_event")]
    pub event_required: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bodyweight_min_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bodyweight_max_kg: Option<f64>,
    pub class_boundaries_kg: Vec<f64>,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    /// (lifter_id, date) pairs exempt from the bodyweight window.
    #[serde(default)]
    pub anchor_rows: Vec<(String, NaiveDate)>,
    /// Points assigned at the curve's own level; defaults per sex when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization_points: Option<f64>,
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        validate_boundaries(&self.class_boundaries_kg)?;
        if self.equipment_allowed.is_empty() {
            return Err(IngestError::Config(
                "equipment_allowed must not be empty".to_string(),
            ));
        }
        if self.event_required.is_empty() {
            return Err(IngestError::Config(
                "event_required must not be empty".to_string(),
            ));
        }
        if self.top_n == 0 {
            return Err(IngestError::Config("top_n must be at least 1".to_string()));
        }
        if let (Some(lo), Some(hi)) = (self.bodyweight_min_kg, self.bodyweight_max_kg) {
            if !(lo < hi) {
                return Err(IngestError::Config(format!(
                    "bodyweight window [{lo}, {hi}] is empty"
                )));
            }
        }
        for bound in [self.bodyweight_min_kg, self.bodyweight_max_kg].into_iter().flatten() {
            if !(bound.is_finite() && bound > 0.0) {
                return Err(IngestError::Config(format!(
                    "bodyweight bounds must be positive and finite, got {bound}"
                )));
            }
        }
        if let Some(np) = self.normalization_points {
            if !(np.is_finite() && np > 0.0) {
                return Err(IngestError::Config(format!(
                    "normalization_points must be positive, got {np}"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<FilterConfig, IngestError> {
        let config: FilterConfig = serde_json::from_str(json)
            .map_err(|e| IngestError::Config(format!("invalid filter config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<FilterConfig, IngestError> {
        let json = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&json)
    }

    /// Default points level for this config's sex: 500 for men, 455 for
    /// women, unless the config pins a value.
    pub fn normalization_or_default(&self) -> f64 {
        self.normalization_points.unwrap_or(match self.sex {
            Sex::M => 500.0,
            Sex::F => 455.0,
        })
    }
}

/// An input entry that did not make the fit sample, and why.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedRow {
    pub lifter_id: String,
    pub date: NaiveDate,
    pub meet_name: Option<String>,
    pub bodyweight_kg: f64,
    pub total_kg: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedEntry {
    pub entry: Entry,
    pub class_label: String,
}

/// The product of selection: fit points plus enough bookkeeping to
/// audit every decision. `points` and `selected` are sorted by
/// bodyweight, then total, then lifter_id, then date, so the sample is
/// a pure function of the input set regardless of row order.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSample {
    pub points: Vec<(f64, f64)>,
    pub selected: Vec<SelectedEntry>,
    pub per_class_counts: BTreeMap<String, usize>,
    pub excluded_log: Vec<ExcludedRow>,
}

fn exclude(log: &mut Vec<ExcludedRow>, entry: &Entry, reason: String) {
    log.push(ExcludedRow {
        lifter_id: entry.lifter_id.clone(),
        date: entry.date,
        meet_name: entry.meet_name.clone(),
        bodyweight_kg: entry.bodyweight_kg,
        total_kg: entry.total_kg,
        reason,
    });
}

/// Ranking order within a class and between a lifter's own results:
/// higher total first, then lighter bodyweight, then earlier date, then
/// lifter_id, then meet name for full determinism.
fn rank_cmp(a: &Entry, b: &Entry) -> std::cmp::Ordering {
    b.total_kg
        .total_cmp(&a.total_kg)
        .then(a.bodyweight_kg.total_cmp(&b.bodyweight_kg))
        .then(a.date.cmp(&b.date))
        .then(a.lifter_id.cmp(&b.lifter_id))
        .then(a.meet_name.cmp(&b.meet_name))
}

/// Builds the fit sample. See the module docs for the stage order; the
/// bodyweight window runs last so an anchor row must beat the same
/// top-N competition as every other entry before its exemption matters.
pub fn select_top_n(entries: &[Entry], config: &FilterConfig) -> Result<FitSample, IngestError> {
    config.validate()?;

    let mut excluded: Vec<ExcludedRow> = Vec::new();
    let mut survivors: Vec<&Entry> = Vec::new();
    for entry in entries {
        if entry.sex != config.sex {
            exclude(&mut excluded, entry, "sex mismatch".to_string());
        } else if !config.equipment_allowed.contains(&entry.equipment) {
            exclude(
                &mut excluded,
                entry,
                format!("equipment not allowed: {}", entry.equipment),
            );
        } else if entry.event != config.event_required {
            exclude(
                &mut excluded,
                entry,
                format!(
                    "event mismatch: {:?} is not {:?}",
                    entry.event, config.event_required
                ),
            );
        } else {
            survivors.push(entry);
        }
    }

    // One result per lifter: the best under the ranking order.
    let mut by_lifter: BTreeMap<&str, Vec<&Entry>> = BTreeMap::new();
    for entry in survivors {
        by_lifter.entry(&entry.lifter_id).or_default().push(entry);
    }
    let mut best: Vec<&Entry> = Vec::new();
    for (_, mut group) in by_lifter {
        group.sort_by(|a, b| rank_cmp(a, b));
        best.push(group[0]);
        for loser in &group[1..] {
            exclude(
                &mut excluded,
                loser,
                "superseded by a better result from the same lifter".to_string(),
            );
        }
    }

    let mut by_class: BTreeMap<String, Vec<&Entry>> = BTreeMap::new();
    for entry in best {
        by_class
            .entry(class_of(entry.bodyweight_kg, &config.class_boundaries_kg))
            .or_default()
            .push(entry);
    }

    let anchors: HashSet<(&str, NaiveDate)> = config
        .anchor_rows
        .iter()
        .map(|(id, date)| (id.as_str(), *date))
        .collect();
    let bounds_reason = format!(
        "outside bodyweight bounds [{}, {}]",
        config
            .bodyweight_min_kg
            .map(|b| boundary_label(b))
            .unwrap_or_else(|| "-".to_string()),
        config
            .bodyweight_max_kg
            .map(|b| boundary_label(b))
            .unwrap_or_else(|| "-".to_string()),
    );

    let mut selected: Vec<SelectedEntry> = Vec::new();
    for (label, mut group) in by_class {
        group.sort_by(|a, b| rank_cmp(a, b));
        let cut = config.top_n.min(group.len());
        for loser in &group[cut..] {
            exclude(
                &mut excluded,
                loser,
                format!("below the top-{} cut for class {}", config.top_n, label),
            );
        }
        for entry in &group[..cut] {
            let below = config
                .bodyweight_min_kg
                .is_some_and(|lo| entry.bodyweight_kg < lo);
            let above = config
                .bodyweight_max_kg
                .is_some_and(|hi| entry.bodyweight_kg > hi);
            let anchored = anchors.contains(&(entry.lifter_id.as_str(), entry.date));
            if (below || above) && !anchored {
                exclude(&mut excluded, entry, bounds_reason.clone());
            } else {
                selected.push(SelectedEntry {
                    entry: (*entry).clone(),
                    class_label: label.clone(),
                });
            }
        }
    }

    if selected.is_empty() {
        return Err(IngestError::EmptySample);
    }

    selected.sort_by(|a, b| {
        a.entry
            .bodyweight_kg
            .total_cmp(&b.entry.bodyweight_kg)
            .then(a.entry.total_kg.total_cmp(&b.entry.total_kg))
            .then(a.entry.lifter_id.cmp(&b.entry.lifter_id))
            .then(a.entry.date.cmp(&b.entry.date))
    });
    excluded.sort_by(|a, b| {
        a.lifter_id
            .cmp(&b.lifter_id)
            .then(a.date.cmp(&b.date))
            .then(a.meet_name.cmp(&b.meet_name))
            .then(a.reason.cmp(&b.reason))
            .then(a.bodyweight_kg.total_cmp(&b.bodyweight_kg))
            .then(a.total_kg.total_cmp(&b.total_kg))
    });

    let mut per_class_counts: BTreeMap<String, usize> = class_labels(&config.class_boundaries_kg)
        .into_iter()
        .map(|label| (label, 0))
        .collect();
    for s in &selected {
        *per_class_counts
            .entry(s.class_label.clone())
            .or_insert(0) += 1;
    }

    let points = selected
        .iter()
        .map(|s| (s.entry.bodyweight_kg, s.entry.total_kg))
        .collect();

    Ok(FitSample {
        points,
        selected,
        per_class_counts,
        excluded_log: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn entry(id: &str, bw: f64, total: f64) -> Entry {
        Entry {
            lifter_id: id.to_string(),
            sex: Sex::M,
            equipment: Equipment::Raw,
            event: "SBD".to_string(),
            bodyweight_kg: bw,
            total_kg: total,
            date: date("2018-06-01"),
            meet_name: Some("Test Meet".to_string()),
        }
    }

    fn config(boundaries: &[f64], top_n: usize) -> FilterConfig {
        FilterConfig {
            sex: Sex::M,
            equipment_allowed: default_equipment(),
            event_required: default_event(),
            bodyweight_min_kg: None,
            bodyweight_max_kg: None,
            class_boundaries_kg: boundaries.to_vec(),
            top_n,
            anchor_rows: vec![],
            normalization_points: None,
        }
    }

    const CSV_HEADER: &str = "Name,Sex,Event,Equipment,BodyweightKg,TotalKg,Date,MeetName\n";

    #[test]
    fn parses_good_rows_and_collects_bad_ones() {
        let data = format!(
            "{CSV_HEADER}\
             Ann Smith,F,SBD,Raw,62.5,400.0,2019-03-01,Spring Open\n\
             Bad Sex,X,SBD,Raw,80.0,500.0,2019-03-01,Spring Open\n\
             No Total,M,SBD,Raw,80.0,,2019-03-01,Spring Open\n\
             Neg Total,M,SBD,Raw,80.0,-5,2019-03-01,Spring Open\n\
             Bad Bw,M,SBD,Raw,n/a,500.0,2019-03-01,Spring Open\n\
             Bad Date,M,SBD,Raw,80.0,500.0,03/01/2019,Spring Open\n\
             Gear Guy,M,SBD,Single-ply,80.0,500.0,2019-03-01,Spring Open\n"
        );
        let outcome = parse_entries(data.as_bytes()).unwrap();
        assert_eq!(outcome.entries.len(), 1);
        assert_eq!(outcome.entries[0].lifter_id, "Ann Smith");
        assert_eq!(outcome.entries[0].meet_name.as_deref(), Some("Spring Open"));
        let reasons: Vec<&str> = outcome.row_errors.iter().map(|e| e.reason.as_str()).collect();
        assert_eq!(
            reasons,
            vec![
                "unrecognized sex \"X\"",
                "missing total",
                "non-positive total \"-5\"",
                "non-numeric bodyweight \"n/a\"",
                "invalid date \"03/01/2019\"",
                "unsupported equipment \"Single-ply\"",
            ]
        );
        // Line numbers are 1-based positions in the file, header on line 1.
        assert_eq!(outcome.row_errors[0].line_no, 3);
    }

    #[test]
    fn missing_required_column_is_fatal() {
        let data = "Name,Sex,Event,Equipment,TotalKg,Date\nA,M,SBD,Raw,500,2019-01-01\n";
        match parse_entries(data.as_bytes()) {
            Err(IngestError::MissingColumn(col)) => assert_eq!(col, "BodyweightKg"),
            other => panic!("expected missing column error, got {other:?}"),
        }
    }

    #[test]
    fn blank_bodyweight_parks_row_for_overrides() {
        let data = format!(
            "{CSV_HEADER}\
             Kim Doe,M,SBD,Raw,,700.0,2019-03-01,Big Meet\n"
        );
        let mut outcome = parse_entries(data.as_bytes()).unwrap();
        assert!(outcome.entries.is_empty());
        assert_eq!(outcome.pending.len(), 1);
        assert_eq!(outcome.row_errors.len(), 1);
        assert_eq!(outcome.row_errors[0].reason, "missing bodyweight");

        let overrides = vec![BodyweightOverride {
            lifter_id: "Kim Doe".to_string(),
            meet_name: "Big Meet".to_string(),
            bodyweight_kg: 92.3,
            note: "weigh-in sheet".to_string(),
        }];
        let report = apply_overrides(&mut outcome, &overrides);
        assert_eq!(report.applied.len(), 1);
        assert_eq!(report.applied[0].replaced, None);
        assert!(report.warnings.is_empty());
        assert_eq!(outcome.entries.len(), 1);
        assert_eq!(outcome.entries[0].bodyweight_kg, 92.3);
        assert!(outcome.pending.is_empty());
        assert!(outcome.row_errors.is_empty());
    }

    #[test]
    fn override_rewrites_existing_entry_and_warns_on_no_match() {
        let data = format!(
            "{CSV_HEADER}\
             Kim Doe,M,SBD,Raw,95.0,700.0,2019-03-01,Big Meet\n"
        );
        let mut outcome = parse_entries(data.as_bytes()).unwrap();
        let overrides = vec![
            BodyweightOverride {
                lifter_id: "Kim Doe".to_string(),
                meet_name: "Big Meet".to_string(),
                bodyweight_kg: 92.3,
                note: "corrected weigh-in".to_string(),
            },
            BodyweightOverride {
                lifter_id: "Kim Doe".to_string(),
                meet_name: "Other Meet".to_string(),
                bodyweight_kg: 90.0,
                note: "corrected weigh-in".to_string(),
            },
        ];
        let report = apply_overrides(&mut outcome, &overrides);
        assert_eq!(report.applied.len(), 1);
        assert_eq!(report.applied[0].replaced, Some(95.0));
        assert_eq!(outcome.entries[0].bodyweight_kg, 92.3);
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].contains("Other Meet"));
    }

    #[test]
    fn overrides_file_rejects_blank_note() {
        let data = "lifter_id,meet_name,bodyweight_kg,note\nA,M1,80.0,\n";
        assert!(matches!(
            parse_overrides(data.as_bytes()),
            Err(IngestError::Overrides(_))
        ));
    }

    #[test]
    fn weight_class_assignment_follows_boundaries() {
        let b = vec![52.0, 60.0, 67.5, 82.5];
        assert_eq!(assign_weight_class(50.0, &b).unwrap(), "-52");
        assert_eq!(assign_weight_class(52.0, &b).unwrap(), "-52");
        assert_eq!(assign_weight_class(52.1, &b).unwrap(), "-60");
        assert_eq!(assign_weight_class(80.0, &b).unwrap(), "-82.5");
        assert_eq!(assign_weight_class(82.5, &b).unwrap(), "-82.5");
        assert_eq!(assign_weight_class(99.0, &b).unwrap(), "+82.5");
        assert!(matches!(
            assign_weight_class(80.0, &[]),
            Err(IngestError::Config(_))
        ));
        assert!(matches!(
            assign_weight_class(80.0, &[60.0, 52.0]),
            Err(IngestError::Config(_))
        ));
    }

    #[test]
    fn class_labels_cover_all_classes() {
        assert_eq!(
            class_labels(&[52.0, 60.0]),
            vec!["-52".to_string(), "-60".to_string(), "+60".to_string()]
        );
    }

    #[test]
    fn selection_keeps_best_per_lifter_and_top_n() {
        let mut entries = vec![
            entry("A", 71.0, 600.0),
            entry("A", 72.0, 650.0), // A's best
            entry("B", 73.0, 640.0),
            entry("C", 74.0, 630.0),
            entry("D", 74.5, 620.0),
        ];
        entries[0].date = date("2017-01-01");
        let sample = select_top_n(&entries, &config(&[75.0], 3)).unwrap();
        assert_eq!(sample.points.len(), 3);
        assert_eq!(sample.per_class_counts["-75"], 3);
        assert_eq!(sample.per_class_counts["+75"], 0);
        let ids: Vec<&str> = sample
            .selected
            .iter()
            .map(|s| s.entry.lifter_id.as_str())
            .collect();
        assert_eq!(ids, vec!["A", "B", "C"]);
        let reasons: Vec<&str> = sample
            .excluded_log
            .iter()
            .map(|e| e.reason.as_str())
            .collect();
        assert!(reasons.contains(&"superseded by a better result from the same lifter"));
        assert!(reasons.iter().any(|r| r.starts_with("below the top-3 cut")));
        // Conservation: every input is either selected or excluded.
        assert_eq!(
            entries.len(),
            sample.selected.len() + sample.excluded_log.len()
        );
    }

    #[test]
    fn ties_break_on_bodyweight_then_date_then_id() {
        let mut e1 = entry("Zed", 74.0, 600.0);
        let mut e2 = entry("Amy", 73.5, 600.0); // lighter wins the tie
        let mut e3 = entry("Bob", 73.5, 600.0); // same bw: earlier date wins
        e1.date = date("2018-01-01");
        e2.date = date("2018-05-01");
        e3.date = date("2018-04-01");
        let entries = [e1, e2, e3];
        let sample = select_top_n(&entries, &config(&[75.0], 2)).unwrap();
        let ids: Vec<&str> = sample
            .selected
            .iter()
            .map(|s| s.entry.lifter_id.as_str())
            .collect();
        // Both 73.5s beat the 74; the sample itself lists equal
        // (bw, total) rows in lifter_id order.
        assert_eq!(ids, vec!["Amy", "Bob"]);
        assert_eq!(sample.excluded_log[0].lifter_id, "Zed");

        // With only one slot the date decides between the equal 73.5s.
        let sample = select_top_n(&entries, &config(&[75.0], 1)).unwrap();
        assert_eq!(sample.selected[0].entry.lifter_id, "Bob");
    }

    #[test]
    fn bounds_run_after_top_n_and_anchors_are_exempt() {
        // Five lifters in one class, top_n 2: "Light" (57 kg) has the
        // second-best total, so it survives top-N; without an anchor it
        // then falls to the bodyweight window.
        let entries = vec![
            entry("Light", 57.0, 640.0),
            entry("Mid", 72.0, 650.0),
            entry("Deep", 71.0, 630.0),
            entry("Deeper", 71.5, 620.0),
        ];
        let mut cfg = config(&[75.0], 2);
        cfg.bodyweight_min_kg = Some(60.0);
        let sample = select_top_n(&entries, &cfg).unwrap();
        assert_eq!(sample.points.len(), 1);
        assert_eq!(sample.selected[0].entry.lifter_id, "Mid");
        assert!(sample
            .excluded_log
            .iter()
            .any(|e| e.lifter_id == "Light" && e.reason.starts_with("outside bodyweight bounds")));

        // Anchored, the same lifter stays in the sample.
        cfg.anchor_rows = vec![("Light".to_string(), date("2018-06-01"))];
        let sample = select_top_n(&entries, &cfg).unwrap();
        assert_eq!(sample.points.len(), 2);
        assert_eq!(sample.selected[0].entry.lifter_id, "Light");

        // An anchor that does not make top-N stays out: exemption is
        // only from the window, not from the competition.
        cfg.anchor_rows = vec![("Deeper".to_string(), date("2018-06-01"))];
        let sample = select_top_n(&entries, &cfg).unwrap();
        assert!(sample
            .selected
            .iter()
            .all(|s| s.entry.lifter_id != "Deeper"));
    }

    #[test]
    fn empty_selection_is_an_error() {
        let entries = vec![entry("A", 80.0, 600.0)];
        let mut cfg = config(&[90.0], 5);
        cfg.sex = Sex::F;
        assert!(matches!(
            select_top_n(&entries, &cfg),
            Err(IngestError::EmptySample)
        ));
    }

    #[test]
    fn filter_config_parses_fixture_shape_and_rejects_typos() {
        let json = r#"{
            "sex": "M",
            "class_boundaries_kg": [60, 75, 90],
            "bodyweight_min_kg": 60.0,
            "anchor_rows": [["Some Name", "2014-05-10"]]
        }"#;
        let cfg = FilterConfig::from_json(json).unwrap();
        assert_eq!(cfg.top_n, 10);
        assert_eq!(cfg.event_required, "SBD");
        assert_eq!(cfg.equipment_allowed, vec![Equipment::Raw, Equipment::Wraps]);
        assert_eq!(cfg.anchor_rows[0].1, date("2014-05-10"));

        let typo = r#"{"sex": "M", "class_boundaries_kg": [60], "bodyweight_min": 1}"#;
        assert!(matches!(
            FilterConfig::from_json(typo),
            Err(IngestError::Config(_))
        ));
    }
}
