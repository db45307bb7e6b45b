//! Shared plumbing: error-to-exit-code mapping, model resolution, data
//! loading, deterministic file output and the run.log sidecar.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use liftscore::builtin;
use liftscore::ingest::{
    apply_overrides, read_entries, read_overrides, Entry, IngestError, OverrideReport,
    ParseOutcome,
};
use liftscore::model::Sex;
use liftscore::modelfile::read_model;
use liftscore::regression::RegressionError;
use liftscore::ScoringModel;

/// Process-level failure. Exit codes: 2 configuration, 3 unreadable or
/// header-broken input data, 4 fit failure, 5 scoring domain error,
/// 1 environment problems writing results.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Ingest(String),
    Fit(String),
    Score(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Ingest(_) => 3,
            CliError::Fit(_) => 4,
            CliError::Score(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Config(_) => "config",
            CliError::Ingest(_) => "ingest",
            CliError::Fit(_) => "fit",
            CliError::Score(_) => "score",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Io(m)
            | CliError::Config(m)
            | CliError::Ingest(m)
            | CliError::Fit(m)
            | CliError::Score(m) => m,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match &e {
            IngestError::Io { .. } | IngestError::Csv(_) | IngestError::MissingColumn(_) => {
                CliError::Ingest(e.to_string())
            }
            IngestError::Config(_) | IngestError::Overrides(_) => CliError::Config(e.to_string()),
            IngestError::EmptySample => CliError::Fit(e.to_string()),
        }
    }
}

impl From<RegressionError> for CliError {
    fn from(e: RegressionError) -> Self {
        match &e {
            RegressionError::DegreeTooLow(_) => CliError::Config(e.to_string()),
            _ => CliError::Fit(e.to_string()),
        }
    }
}

impl From<liftscore::diagnostics::DiagnosticsError> for CliError {
    fn from(e: liftscore::diagnostics::DiagnosticsError) -> Self {
        use liftscore::diagnostics::DiagnosticsError as D;
        match e {
            D::Ingest(inner) => inner.into(),
            D::Regression(inner) => inner.into(),
            D::Model(inner) => CliError::Fit(inner.to_string()),
            D::TrendNeedsSpread(_) => CliError::Fit(e.to_string()),
        }
    }
}

pub fn parse_sex(flag: &Option<String>) -> Result<Option<Sex>, CliError> {
    match flag {
        None => Ok(None),
        Some(s) => Sex::parse(s)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("--sex must be M or F, got {s:?}"))),
    }
}

/// Resolves a --model argument. Built-in names win over paths; the
/// sex-generic "wilks-classic" yields one model per sex unless --sex
/// narrows it down.
pub fn resolve_models(arg: &str, sex: Option<Sex>) -> Result<Vec<ScoringModel>, CliError> {
    if builtin::is_builtin_name(arg) {
        let load = |s: Sex| -> Result<ScoringModel, CliError> {
            builtin::builtin_for_sex(arg, s)
                .ok_or_else(|| CliError::Config(format!("unknown built-in model {arg:?}")))?
                .map_err(|e| CliError::Config(format!("built-in model {arg:?}: {e}")))
        };
        return match (builtin::builtin_model(arg), sex) {
            // Name is already sex-specific.
            (Some(result), wanted) => {
                let model =
                    result.map_err(|e| CliError::Config(format!("built-in model {arg:?}: {e}")))?;
                if let Some(s) = wanted {
                    if model.sex() != s {
                        return Err(CliError::Config(format!(
                            "model {arg:?} is for sex {}, but --sex {s} was given",
                            model.sex()
                        )));
                    }
                }
                Ok(vec![model])
            }
            (None, Some(s)) => Ok(vec![load(s)?]),
            (None, None) => Ok(vec![load(Sex::M)?, load(Sex::F)?]),
        };
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "model {arg:?} is neither a built-in name nor an existing file"
        )));
    }
    let model = read_model(path).map_err(|e| CliError::Config(format!("model {arg:?}: {e}")))?;
    if let Some(s) = sex {
        if model.sex() != s {
            return Err(CliError::Config(format!(
                "model {arg:?} is for sex {}, but --sex {s} was given",
                model.sex()
            )));
        }
    }
    Ok(vec![model])
}

/// Like [`resolve_models`] but for commands that need exactly one model.
pub fn resolve_single_model(arg: &str, sex: Option<Sex>) -> Result<ScoringModel, CliError> {
    let mut models = resolve_models(arg, sex)?;
    if models.len() != 1 {
        return Err(CliError::Config(format!(
            "model {arg:?} is sex-generic; pick one with --sex M or --sex F"
        )));
    }
    Ok(models.pop().expect("checked length"))
}

/// Parses a --degrees spec: "4", "2,3,4" or "2..5" (inclusive).
pub fn parse_degrees(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = |detail: &str| CliError::Config(format!("cannot parse --degrees {spec:?}: {detail}"));
    let parse_one = |s: &str| -> Result<usize, CliError> {
        s.trim()
            .parse::<usize>()
            .map_err(|_| bad(&format!("{s:?} is not a degree")))
    };
    let degrees: Vec<usize> = if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
        if lo > hi {
            return Err(bad("range is reversed"));
        }
        (lo..=hi).collect()
    } else if spec.contains(',') {
        spec.split(',').map(parse_one).collect::<Result<_, _>>()?
    } else {
        vec![parse_one(spec)?]
    };
    if degrees.iter().any(|&d| d < 1) {
        return Err(bad("degrees start at 1"));
    }
    if degrees.len() > 16 {
        return Err(bad("more than 16 degrees requested"));
    }
    Ok(degrees)
}

/// Loaded input data plus everything worth reporting about the load.
pub struct LoadedData {
    pub entries: Vec<Entry>,
    pub outcome_errors: Vec<liftscore::ingest::RowError>,
    pub override_report: OverrideReport,
}

pub fn load_data(data: &Path, overrides: Option<&Path>) -> Result<LoadedData, CliError> {
    let mut outcome: ParseOutcome = read_entries(data)?;
    let override_report = match overrides {
        Some(path) => {
            let overrides = read_overrides(path)?;
            apply_overrides(&mut outcome, &overrides)
        }
        None => OverrideReport::default(),
    };
    Ok(LoadedData {
        entries: outcome.entries,
        outcome_errors: outcome.row_errors,
        override_report,
    })
}

/// Run log: the one output file that is allowed to differ between
/// byte-identical runs (it carries the timestamp). Everything odd about
/// a run lands here in full, with a short summary on stderr.
pub struct RunLog {
    lines: Vec<String>,
}

impl RunLog {
    pub fn new(command: &str) -> RunLog {
        let args: Vec<String> = std::env::args().skip(1).collect();
        RunLog {
            lines: vec![
                format!("timestamp_utc: {}", chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ")),
                format!("command: {command}"),
                format!("args: {}", args.join(" ")),
            ],
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    /// Records load anomalies and mirrors a one-line summary to stderr.
    pub fn note_load(&mut self, data: &LoadedData) {
        if !data.outcome_errors.is_empty() {
            self.note(format!("row_errors: {}", data.outcome_errors.len()));
            for e in &data.outcome_errors {
                self.note(format!("row_error line {}: {}", e.line_no, e.reason));
            }
            eprintln!(
                "warning: {} rows could not be used (reasons in run.log)",
                data.outcome_errors.len()
            );
        }
        for a in &data.override_report.applied {
            let was = match a.replaced {
                Some(old) => format!("replaced {old}"),
                None => "filled missing bodyweight".to_string(),
            };
            self.note(format!(
                "override applied: {} @ {} -> {} kg ({was}; note: {})",
                a.lifter_id, a.meet_name, a.bodyweight_kg, a.note
            ));
        }
        for w in &data.override_report.warnings {
            self.note(format!("override warning: {w}"));
            eprintln!("warning: {w}");
        }
    }

    pub fn write(self, out_dir: &Path) -> Result<(), CliError> {
        let mut body = String::new();
        for line in &self.lines {
            let _ = writeln!(body, "{line}");
        }
        write_file(out_dir, "run.log", body.as_bytes())
    }
}

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// Atomic file write: temp file in the target directory, then rename.
/// Reruns either leave the old file or replace it whole.
pub fn write_file(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |what: &str, e: std::io::Error| {
        CliError::Io(format!("{what} {}: {e}", out_dir.join(name).display()))
    };
    let mut tmp = tempfile::NamedTempFile::new_in(out_dir)
        .map_err(|e| io_err("cannot stage", e))?;
    tmp.write_all(bytes).map_err(|e| io_err("cannot write", e))?;
    tmp.persist(out_dir.join(name))
        .map_err(|e| CliError::Io(format!("cannot finish {}: {e}", out_dir.join(name).display())))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(
    out_dir: &Path,
    name: &str,
    value: &T,
) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
    body.push('\n');
    write_file(out_dir, name, body.as_bytes())
}

/// Two-decimal points rounding, half away from zero (519.125 -> 519.13).
pub fn round2(points: f64) -> f64 {
    (points * 100.0).round() / 100.0
}

pub fn fmt2(points: f64) -> String {
    format!("{:.2}", round2(points))
}

/// Shortest-round-trip float formatting for raw values in CSV cells.
pub fn fmt_raw(value: f64) -> String {
    format!("{value}")
}

pub fn path_buf_name(path: &PathBuf) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_specs_parse() {
        assert_eq!(parse_degrees("4").unwrap(), vec![4]);
        assert_eq!(parse_degrees("2,3,4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_degrees("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert!(parse_degrees("0").is_err());
        assert!(parse_degrees("5..2").is_err());
        assert!(parse_degrees("a,b").is_err());
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        // 0.125 is exactly representable, so this is a true tie.
        assert_eq!(fmt2(0.125), "0.13");
        assert_eq!(fmt2(519.894), "519.89");
        assert_eq!(fmt2(519.896), "519.90");
        assert_eq!(fmt2(520.0), "520.00");
        assert_eq!(fmt2(608.589071906651), "608.59");
    }
}
