//! diagnose: score a population under a model (optionally two models
//! side by side) and emit the fairness/shape report plus the data
//! behind it.

use std::path::Path;

use liftscore::diagnostics::{diagnostics_report, DiagnosticsParams, ScoredEntry};
use liftscore::ingest::{
    class_labels, default_class_boundaries, select_top_n, Entry, FilterConfig,
};
use liftscore::poly::grid_points;
use liftscore::ScoringModel;

use crate::cli::DiagnoseArgs;
use crate::common::{
    ensure_out_dir, fmt2, fmt_raw, load_data, parse_sex, resolve_single_model, write_file,
    write_json, CliError, RunLog,
};

fn check_params(args: &DiagnoseArgs) -> Result<DiagnosticsParams, CliError> {
    if !(args.grid_step.is_finite() && args.grid_step > 0.0) {
        return Err(CliError::Config(format!(
            "--grid-step must be positive, got {}",
            args.grid_step
        )));
    }
    if !(args.plateau_threshold.is_finite() && args.plateau_threshold > 0.0) {
        return Err(CliError::Config(format!(
            "--plateau-threshold must be positive, got {}",
            args.plateau_threshold
        )));
    }
    if !(args.fairness_slope.is_finite() && args.fairness_slope >= 0.0) {
        return Err(CliError::Config(format!(
            "--fairness-slope must be non-negative, got {}",
            args.fairness_slope
        )));
    }
    if args.top_k == 0 {
        return Err(CliError::Config("--top-k must be at least 1".to_string()));
    }
    Ok(DiagnosticsParams {
        top_k: args.top_k,
        grid_step: args.grid_step,
        plateau_threshold: args.plateau_threshold,
        fairness_slope: args.fairness_slope,
    })
}

/// Scores labeled entries under a model, keeping the labels. Used for
/// the selection-sample path where classes come from the filter config.
fn score_labeled(
    model: &ScoringModel,
    labeled: &[(Entry, String)],
    log: &mut RunLog,
    which: &str,
) -> Vec<ScoredEntry> {
    let mut scored = Vec::new();
    let mut skips = 0usize;
    for (entry, label) in labeled {
        match model.score(entry.bodyweight_kg, entry.total_kg) {
            Ok(s) => scored.push(ScoredEntry {
                entry: entry.clone(),
                class_label: label.clone(),
                points: s.points,
                extrapolated: s.extrapolated,
            }),
            Err(e) => {
                skips += 1;
                log.note(format!(
                    "skipped under {which}: {} ({} kg, {}): {e}",
                    entry.lifter_id, entry.bodyweight_kg, entry.date
                ));
            }
        }
    }
    if skips > 0 {
        eprintln!("warning: {skips} rows were not scored under {which} (reasons in run.log)");
    }
    scored
}

fn write_outputs(
    out_dir: &Path,
    suffix: &str,
    model: &ScoringModel,
    scored: &[ScoredEntry],
    labels: &[String],
    params: &DiagnosticsParams,
) -> Result<(), CliError> {
    let report = diagnostics_report(scored, model, labels, params);
    write_json(out_dir, &format!("diagnostics{suffix}.json"), &report)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "lifter_id",
        "date",
        "meet_name",
        "class",
        "bodyweight_kg",
        "total_kg",
        "points",
        "extrapolated",
    ])
    .expect("in-memory CSV write");
    for s in scored {
        w.write_record([
            s.entry.lifter_id.as_str(),
            &s.entry.date.to_string(),
            s.entry.meet_name.as_deref().unwrap_or(""),
            s.class_label.as_str(),
            &fmt_raw(s.entry.bodyweight_kg),
            &fmt_raw(s.entry.total_kg),
            &fmt2(s.points),
            if s.extrapolated { "true" } else { "false" },
        ])
        .expect("in-memory CSV write");
    }
    write_file(
        out_dir,
        &format!("scored{suffix}.csv"),
        &w.into_inner().expect("in-memory CSV flush"),
    )?;

    let deriv = model.poly().derivative();
    let (lo, hi) = model.domain_kg();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bodyweight_kg", "curve_total_kg", "derivative_kg_per_kg"])
        .expect("in-memory CSV write");
    for x in grid_points(lo, hi, params.grid_step) {
        w.write_record([
            fmt_raw(x),
            fmt_raw(model.poly().eval(x).expect("finite grid")),
            fmt_raw(deriv.eval(x).expect("finite grid")),
        ])
        .expect("in-memory CSV write");
    }
    write_file(
        out_dir,
        &format!("curve{suffix}.csv"),
        &w.into_inner().expect("in-memory CSV flush"),
    )
}

pub fn run(args: &DiagnoseArgs) -> Result<(), CliError> {
    let sex = parse_sex(&args.sex)?;
    let model = resolve_single_model(&args.model, sex)?;
    let model2 = args
        .model2
        .as_ref()
        .map(|m| resolve_single_model(m, Some(model.sex())))
        .transpose()?;
    let params = check_params(args)?;

    ensure_out_dir(&args.out_dir)?;
    let mut log = RunLog::new("diagnose");
    let loaded = load_data(&args.data, args.overrides.as_deref())?;
    log.note_load(&loaded);

    // The population: either the fit sample a config selects, carrying
    // its class labels, or every parseable row of the model's sex.
    let (labeled, labels): (Vec<(Entry, String)>, Vec<String>) = match &args.filter_config {
        Some(path) => {
            let config = FilterConfig::read(path)?;
            if config.sex != model.sex() {
                return Err(CliError::Config(format!(
                    "filter config is for sex {}, model is for sex {}",
                    config.sex,
                    model.sex()
                )));
            }
            let sample = select_top_n(&loaded.entries, &config)?;
            log.note(format!(
                "selection: {} points kept, {} excluded",
                sample.points.len(),
                sample.excluded_log.len()
            ));
            let labels = class_labels(&config.class_boundaries_kg);
            (
                sample
                    .selected
                    .into_iter()
                    .map(|s| (s.entry, s.class_label))
                    .collect(),
                labels,
            )
        }
        None => {
            let boundaries = default_class_boundaries(model.sex());
            let labels = class_labels(boundaries);
            // Labeling piggybacks on the scorer below; here only sex
            // filtering happens so skips stay per-model.
            (
                loaded
                    .entries
                    .iter()
                    .filter(|e| e.sex == model.sex())
                    .map(|e| {
                        (
                            e.clone(),
                            liftscore::ingest::assign_weight_class(e.bodyweight_kg, boundaries)
                                .expect("default boundaries are valid"),
                        )
                    })
                    .collect(),
                labels,
            )
        }
    };
    let dropped_sex = loaded.entries.iter().filter(|e| e.sex != model.sex()).count();
    if args.filter_config.is_none() && dropped_sex > 0 {
        log.note(format!(
            "ignored: {dropped_sex} rows of the other sex (no filter config given)"
        ));
    }

    let scored = score_labeled(&model, &labeled, &mut log, "--model");
    write_outputs(&args.out_dir, "", &model, &scored, &labels, &params)?;

    if let Some(second) = &model2 {
        let scored2 = score_labeled(second, &labeled, &mut log, "--model2");
        write_outputs(&args.out_dir, "_2", second, &scored2, &labels, &params)?;
    }

    log.write(&args.out_dir)
}
