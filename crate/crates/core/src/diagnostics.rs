//! Fairness and shape diagnostics for a scoring model: does the score
//! still correlate with bodyweight, which classes dominate the top of
//! the ranking, is the underlying curve monotone, and does it have
//! flat spots that would let a lifter gain weight for free.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{class_labels, select_top_n, Entry, FilterConfig, IngestError};
use crate::model::{ModelError, ScoringModel, Sex};
use crate::poly::Polynomial;
use crate::regression::{fit_polynomial, FitReport, RegressionError};

pub const DEFAULT_FAIRNESS_SLOPE: f64 = 0.15;
pub const DEFAULT_PLATEAU_THRESHOLD: f64 = 0.5;
pub const DEFAULT_PLATEAU_STEP: f64 = 0.5;
pub const DEFAULT_GRID_STEP: f64 = 0.1;
pub const DEFAULT_TOP_K: usize = 25;
pub const MAX_CLASS_SHARE_ADVISORY: f64 = 0.3;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("score trend needs at least 2 distinct bodyweights, got {0}")]
    TrendNeedsSpread(usize),
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// One scored result, carrying the class label it was counted under.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredEntry {
    pub entry: Entry,
    pub class_label: String,
    pub points: f64,
    pub extrapolated: bool,
}

/// A row that could not be scored in a batch, and why. Batch scoring
/// never aborts on individual rows; callers surface these as warnings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSkip {
    pub lifter_id: String,
    pub date: NaiveDate,
    pub bodyweight_kg: f64,
    pub reason: String,
}

/// Scores a batch under one model. Rows of the other sex and rows whose
/// bodyweight falls outside the model's scoring interval are skipped
/// with a reason; everything else comes back scored and labeled with
/// its class under `boundaries`.
pub fn score_entries(
    model: &ScoringModel,
    entries: &[Entry],
    boundaries: &[f64],
) -> (Vec<ScoredEntry>, Vec<ScoreSkip>) {
    let mut scored = Vec::new();
    let mut skipped = Vec::new();
    for entry in entries {
        let mut skip = |reason: String| {
            skipped.push(ScoreSkip {
                lifter_id: entry.lifter_id.clone(),
                date: entry.date,
                bodyweight_kg: entry.bodyweight_kg,
                reason,
            });
        };
        if entry.sex != model.sex() {
            skip(format!("no model loaded for sex {}", entry.sex));
            continue;
        }
        match model.score(entry.bodyweight_kg, entry.total_kg) {
            Ok(score) => scored.push(ScoredEntry {
                entry: entry.clone(),
                class_label: class_of_or_empty(entry.bodyweight_kg, boundaries),
                points: score.points,
                extrapolated: score.extrapolated,
            }),
            Err(e) => skip(e.to_string()),
        }
    }
    (scored, skipped)
}

fn class_of_or_empty(bodyweight_kg: f64, boundaries: &[f64]) -> String {
    crate::ingest::assign_weight_class(bodyweight_kg, boundaries).unwrap_or_default()
}

/// Least-squares line through (bodyweight, points). A fair model keeps
/// the slope near zero; the sign says which end of the scale is favored.
pub fn score_trend(scored: &[ScoredEntry]) -> Result<(f64, f64), DiagnosticsError> {
    let mut distinct: Vec<f64> = scored.iter().map(|s| s.entry.bodyweight_kg).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(DiagnosticsError::TrendNeedsSpread(distinct.len()));
    }
    let points: Vec<(f64, f64)> = scored
        .iter()
        .map(|s| (s.entry.bodyweight_kg, s.points))
        .collect();
    let fit = fit_polynomial(&points, 1)?;
    let c = fit.poly.coefficients();
    Ok((c[1], c[0]))
}

/// The k best-scoring entries (ties: lower bodyweight, then lifter_id)
/// and how they distribute over weight classes. Classes with no
/// representative are reported with an explicit zero.
pub fn top_k_distribution(
    scored: &[ScoredEntry],
    k: usize,
    labels: &[String],
) -> (Vec<ScoredEntry>, BTreeMap<String, usize>) {
    let mut ordered: Vec<&ScoredEntry> = scored.iter().collect();
    ordered.sort_by(|a, b| {
        b.points
            .total_cmp(&a.points)
            .then(a.entry.bodyweight_kg.total_cmp(&b.entry.bodyweight_kg))
            .then(a.entry.lifter_id.cmp(&b.entry.lifter_id))
    });
    let top: Vec<ScoredEntry> = ordered.into_iter().take(k).cloned().collect();
    let mut counts: BTreeMap<String, usize> =
        labels.iter().map(|l| (l.clone(), 0)).collect();
    for s in &top {
        *counts.entry(s.class_label.clone()).or_insert(0) += 1;
    }
    (top, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub monotone: bool,
    pub min_derivative: f64,
    pub argmin_kg: f64,
}

/// Scans the curve's derivative over the fitted domain. Monotone means
/// strictly positive at every grid point; the minimum and where it
/// occurs are reported either way.
pub fn monotonicity_check(model: &ScoringModel, grid_step: f64) -> MonotonicityReport {
    let deriv = model.poly().derivative();
    let (lo, hi) = model.domain_kg();
    let mut min_derivative = f64::INFINITY;
    let mut argmin_kg = lo;
    for x in crate::poly::grid_points(lo, hi, grid_step) {
        let d = deriv.eval(x).expect("finite grid point");
        if d < min_derivative {
            min_derivative = d;
            argmin_kg = x;
        }
    }
    MonotonicityReport {
        monotone: min_derivative > 0.0,
        min_derivative,
        argmin_kg,
    }
}

/// Maximal contiguous grid spans where |f'(x)| < threshold, reported as
/// [start, end] pairs (a single flagged grid point gives start == end).
/// Flat spots are where a scoring curve stops distinguishing
/// bodyweights, so small spans matter and adjacent ones are not merged.
pub fn plateau_scan(
    poly: &Polynomial,
    interval_kg: (f64, f64),
    threshold: f64,
    step: f64,
) -> Vec<(f64, f64)> {
    let deriv = poly.derivative();
    let mut spans: Vec<(f64, f64)> = Vec::new();
    let mut current: Option<(f64, f64)> = None;
    for x in crate::poly::grid_points(interval_kg.0, interval_kg.1, step) {
        let flat = deriv.eval(x).expect("finite grid point").abs() < threshold;
        current = match (current, flat) {
            (None, true) => Some((x, x)),
            (Some((s, _)), true) => Some((s, x)),
            (Some(span), false) => {
                spans.push(span);
                None
            }
            (None, false) => None,
        };
    }
    if let Some(span) = current {
        spans.push(span);
    }
    spans
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopEntry {
    pub lifter_id: String,
    pub date: NaiveDate,
    pub meet_name: Option<String>,
    pub class_label: String,
    pub bodyweight_kg: f64,
    pub total_kg: f64,
    pub points: f64,
    pub extrapolated: bool,
}

impl From<&ScoredEntry> for TopEntry {
    fn from(s: &ScoredEntry) -> Self {
        TopEntry {
            lifter_id: s.entry.lifter_id.clone(),
            date: s.entry.date,
            meet_name: s.entry.meet_name.clone(),
            class_label: s.class_label.clone(),
            bodyweight_kg: s.entry.bodyweight_kg,
            total_kg: s.entry.total_kg,
            points: s.points,
            extrapolated: s.extrapolated,
        }
    }
}

/// Everything the diagnostics pass produces for one scored population
/// against one model. A failed trend (all entries at one bodyweight)
/// is reported in `trend_error` without sinking the rest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend_intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend_error: Option<String>,
    pub fairness_slope_threshold: f64,
    /// |trend_slope| <= threshold; None when the trend failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fair: Option<bool>,
    pub top_k_requested: usize,
    pub top_k: Vec<TopEntry>,
    pub top_k_class_counts: BTreeMap<String, usize>,
    pub max_class_share: f64,
    pub max_class_share_advisory: f64,
    pub monotone: bool,
    pub min_derivative: f64,
    pub argmin_kg: f64,
    pub grid_step: f64,
    pub plateau_threshold: f64,
    pub plateau_intervals: Vec<(f64, f64)>,
    pub sample_size: usize,
}

/// Tunables for [`diagnostics_report`]; `Default` gives the documented
/// standard settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsParams {
    pub top_k: usize,
    pub grid_step: f64,
    pub plateau_threshold: f64,
    pub fairness_slope: f64,
}

impl Default for DiagnosticsParams {
    fn default() -> Self {
        DiagnosticsParams {
            top_k: DEFAULT_TOP_K,
            grid_step: DEFAULT_GRID_STEP,
            plateau_threshold: DEFAULT_PLATEAU_THRESHOLD,
            fairness_slope: DEFAULT_FAIRNESS_SLOPE,
        }
    }
}

pub fn diagnostics_report(
    scored: &[ScoredEntry],
    model: &ScoringModel,
    labels: &[String],
    params: &DiagnosticsParams,
) -> DiagnosticsReport {
    let (trend_slope, trend_intercept, trend_error, fair) = match score_trend(scored) {
        Ok((slope, intercept)) => (
            Some(slope),
            Some(intercept),
            None,
            Some(slope.abs() <= params.fairness_slope),
        ),
        Err(e) => (None, None, Some(e.to_string()), None),
    };
    let (top, counts) = top_k_distribution(scored, params.top_k, labels);
    let max_class_share = if top.is_empty() {
        0.0
    } else {
        let max_count = counts.values().copied().max().unwrap_or(0);
        max_count as f64 / top.len() as f64
    };
    let mono = monotonicity_check(model, params.grid_step);
    let plateau_intervals = plateau_scan(
        model.poly(),
        model.domain_kg(),
        params.plateau_threshold,
        DEFAULT_PLATEAU_STEP,
    );
    DiagnosticsReport {
        trend_slope,
        trend_intercept,
        trend_error,
        fairness_slope_threshold: params.fairness_slope,
        fair,
        top_k_requested: params.top_k,
        top_k: top.iter().map(TopEntry::from).collect(),
        top_k_class_counts: counts,
        max_class_share,
        max_class_share_advisory: MAX_CLASS_SHARE_ADVISORY,
        monotone: mono.monotone,
        min_derivative: mono.min_derivative,
        argmin_kg: mono.argmin_kg,
        grid_step: params.grid_step,
        plateau_threshold: params.plateau_threshold,
        plateau_intervals,
        sample_size: scored.len(),
    }
}

/// Per-class spread (max points - min points) of one population scored
/// under two fits. Extrapolating a windowed fit down into the light
/// classes compresses their score spread relative to a fit that saw
/// them; comparing the columns makes that visible per class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSpread {
    pub class_label: String,
    pub lifters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread_full: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread_restricted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn trend_summary(scored: &[ScoredEntry]) -> TrendSummary {
    match score_trend(scored) {
        Ok((slope, intercept)) => TrendSummary {
            slope: Some(slope),
            intercept: Some(intercept),
            error: None,
        },
        Err(e) => TrendSummary {
            slope: None,
            intercept: None,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasArm {
    pub sample_size: usize,
    pub degree: usize,
    pub r_squared: f64,
    pub coefficients: Vec<f64>,
    pub fitted_range_kg: (f64, f64),
    pub trend: TrendSummary,
}

/// Outcome of fitting the same degree with and without a bodyweight
/// window and scoring the unrestricted sample under both curves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasExperimentReport {
    pub degree: usize,
    pub full: BiasArm,
    pub restricted: BiasArm,
    pub class_spread: Vec<ClassSpread>,
}

fn sample_range(points: &[(f64, f64)]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(x, _) in points {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

fn arm_model(
    fit: &FitReport,
    sex: Sex,
    normalization: f64,
    fitted_range: (f64, f64),
    scoring_range: (f64, f64),
) -> Result<ScoringModel, DiagnosticsError> {
    let extrapolation = (
        fitted_range.0.min(scoring_range.0),
        fitted_range.1.max(scoring_range.1),
    );
    Ok(ScoringModel::new(
        sex,
        fit.poly.clone(),
        normalization,
        fitted_range,
        extrapolation,
        None,
    )?)
}

/// Fits `degree` on the samples selected by both configs, scores the
/// full-config sample under both curves, and reports per-class spreads
/// plus both score trends. Classes come from the full config's
/// boundaries. Errors if either selection is empty, either fit fails,
/// or a fitted curve is not positive across the scored range.
pub fn bias_experiment(
    entries: &[Entry],
    full_config: &FilterConfig,
    restricted_config: &FilterConfig,
    degree: usize,
) -> Result<BiasExperimentReport, DiagnosticsError> {
    let full_sample = select_top_n(entries, full_config)?;
    let restricted_sample = select_top_n(entries, restricted_config)?;
    let full_fit = fit_polynomial(&full_sample.points, degree)?;
    let restricted_fit = fit_polynomial(&restricted_sample.points, degree)?;

    let full_range = sample_range(&full_sample.points);
    let restricted_range = sample_range(&restricted_sample.points);
    let full_model = arm_model(
        &full_fit,
        full_config.sex,
        full_config.normalization_or_default(),
        full_range,
        full_range,
    )?;
    let restricted_model = arm_model(
        &restricted_fit,
        restricted_config.sex,
        restricted_config.normalization_or_default(),
        restricted_range,
        full_range,
    )?;

    let score_all = |model: &ScoringModel| -> Result<Vec<ScoredEntry>, DiagnosticsError> {
        full_sample
            .selected
            .iter()
            .map(|s| {
                let score = model.score(s.entry.bodyweight_kg, s.entry.total_kg)?;
                Ok(ScoredEntry {
                    entry: s.entry.clone(),
                    class_label: s.class_label.clone(),
                    points: score.points,
                    extrapolated: score.extrapolated,
                })
            })
            .collect()
    };
    let scored_full = score_all(&full_model)?;
    let scored_restricted = score_all(&restricted_model)?;

    let labels = class_labels(&full_config.class_boundaries_kg);
    let mut class_spread = Vec::with_capacity(labels.len());
    for label in &labels {
        let spread = |scored: &[ScoredEntry]| -> Option<f64> {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut seen = 0usize;
            for s in scored.iter().filter(|s| &s.class_label == label) {
                min = min.min(s.points);
                max = max.max(s.points);
                seen += 1;
            }
            (seen > 0).then_some(max - min)
        };
        let lifters = scored_full.iter().filter(|s| &s.class_label == label).count();
        class_spread.push(ClassSpread {
            class_label: label.clone(),
            lifters,
            spread_full: spread(&scored_full),
            spread_restricted: spread(&scored_restricted),
        });
    }

    Ok(BiasExperimentReport {
        degree,
        full: BiasArm {
            sample_size: full_sample.points.len(),
            degree,
            r_squared: full_fit.r_squared,
            coefficients: full_fit.poly.coefficients().to_vec(),
            fitted_range_kg: full_range,
            trend: trend_summary(&scored_full),
        },
        restricted: BiasArm {
            sample_size: restricted_sample.points.len(),
            degree,
            r_squared: restricted_fit.r_squared,
            coefficients: restricted_fit.poly.coefficients().to_vec(),
            fitted_range_kg: restricted_range,
            trend: trend_summary(&scored_restricted),
        },
        class_spread,
    })
}
