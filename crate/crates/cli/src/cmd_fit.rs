//! fit: select a sample, sweep the requested degrees, emit per-degree
//! reports and save the chosen degree as model.json.

use serde::Serialize;

use liftscore::ingest::{select_top_n, FilterConfig, FitSample};
use liftscore::model::FitMeta;
use liftscore::modelfile::model_to_json;
use liftscore::regression::{fit_sweep, FitReport};
use liftscore::ScoringModel;

use crate::cli::FitArgs;
use crate::common::{
    ensure_out_dir, fmt_raw, load_data, parse_degrees, path_buf_name, write_file, write_json,
    CliError, RunLog,
};

#[derive(Serialize)]
struct DegreeReport<'a> {
    degree: usize,
    coefficients: &'a [f64],
    r_squared: f64,
    sample_size: usize,
    condition_estimate: f64,
}

fn csv_into_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    build(&mut writer).expect("in-memory CSV write");
    writer.into_inner().expect("in-memory CSV flush")
}

fn write_sample_files(
    out_dir: &std::path::Path,
    sample: &FitSample,
) -> Result<(), CliError> {
    let selected = csv_into_string(|w| {
        w.write_record(["lifter_id", "date", "meet_name", "class", "bodyweight_kg", "total_kg"])?;
        for s in &sample.selected {
            w.write_record([
                s.entry.lifter_id.as_str(),
                &s.entry.date.to_string(),
                s.entry.meet_name.as_deref().unwrap_or(""),
                s.class_label.as_str(),
                &fmt_raw(s.entry.bodyweight_kg),
                &fmt_raw(s.entry.total_kg),
            ])?;
        }
        Ok(())
    });
    write_file(out_dir, "selected.csv", &selected)?;

    let excluded = csv_into_string(|w| {
        w.write_record(["lifter_id", "date", "meet_name", "bodyweight_kg", "total_kg", "reason"])?;
        for e in &sample.excluded_log {
            w.write_record([
                e.lifter_id.as_str(),
                &e.date.to_string(),
                e.meet_name.as_deref().unwrap_or(""),
                &fmt_raw(e.bodyweight_kg),
                &fmt_raw(e.total_kg),
                e.reason.as_str(),
            ])?;
        }
        Ok(())
    });
    write_file(out_dir, "excluded.csv", &excluded)
}

fn write_degree_files(
    out_dir: &std::path::Path,
    sample: &FitSample,
    fit: &FitReport,
) -> Result<(), CliError> {
    write_json(
        out_dir,
        &format!("fit_degree_{}.json", fit.degree),
        &DegreeReport {
            degree: fit.degree,
            coefficients: fit.poly.coefficients(),
            r_squared: fit.r_squared,
            sample_size: fit.sample_size,
            condition_estimate: fit.condition_estimate,
        },
    )?;
    let residuals = csv_into_string(|w| {
        w.write_record([
            "lifter_id",
            "bodyweight_kg",
            "total_kg",
            "predicted_kg",
            "residual_kg",
        ])?;
        for (s, &(x, r)) in sample.selected.iter().zip(&fit.residuals) {
            debug_assert_eq!(s.entry.bodyweight_kg, x);
            w.write_record([
                s.entry.lifter_id.as_str(),
                &fmt_raw(x),
                &fmt_raw(s.entry.total_kg),
                &fmt_raw(s.entry.total_kg - r),
                &fmt_raw(r),
            ])?;
        }
        Ok(())
    });
    write_file(out_dir, &format!("residuals_degree_{}.csv", fit.degree), &residuals)
}

pub fn run(args: &FitArgs) -> Result<(), CliError> {
    let config = FilterConfig::read(&args.filter_config)?;
    let degrees = parse_degrees(&args.degrees)?;
    let selected_degree = match args.select {
        Some(d) => {
            if !degrees.contains(&d) {
                return Err(CliError::Config(format!(
                    "--select {d} is not among the fitted degrees {degrees:?}"
                )));
            }
            d
        }
        None if degrees.contains(&4) => 4,
        None if degrees.len() == 1 => degrees[0],
        None => {
            return Err(CliError::Config(format!(
                "several degrees fitted ({degrees:?}) and none is 4; choose one with --select"
            )));
        }
    };

    ensure_out_dir(&args.out_dir)?;
    let mut log = RunLog::new("fit");
    let data = load_data(&args.data, args.overrides.as_deref())?;
    log.note_load(&data);

    let sample = select_top_n(&data.entries, &config)?;
    let (lo, hi) = (
        sample.points.first().expect("non-empty sample").0,
        sample.points.last().expect("non-empty sample").0,
    );
    log.note(format!(
        "sample: {} points over [{lo}, {hi}] kg, {} excluded",
        sample.points.len(),
        sample.excluded_log.len()
    ));
    write_sample_files(&args.out_dir, &sample)?;

    let sweep = fit_sweep(&sample.points, &degrees);
    let selection_csv = csv_into_string(|w| {
        w.write_record([
            "degree",
            "status",
            "r_squared",
            "condition_estimate",
            "max_abs_residual_kg",
            "error",
        ])?;
        for (degree, result) in &sweep {
            match result {
                Ok(fit) => {
                    let worst = fit
                        .residuals
                        .iter()
                        .map(|r| r.1.abs())
                        .fold(0.0_f64, f64::max);
                    w.write_record([
                        degree.to_string(),
                        "ok".to_string(),
                        fmt_raw(fit.r_squared),
                        fmt_raw(fit.condition_estimate),
                        fmt_raw(worst),
                        String::new(),
                    ])?;
                }
                Err(e) => {
                    w.write_record([
                        degree.to_string(),
                        "error".to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.to_string(),
                    ])?;
                }
            }
        }
        Ok(())
    });
    write_file(&args.out_dir, "degree_selection.csv", &selection_csv)?;

    for (_, result) in &sweep {
        if let Ok(fit) = result {
            write_degree_files(&args.out_dir, &sample, fit)?;
        }
    }

    let chosen = sweep
        .iter()
        .find(|(d, _)| *d == selected_degree)
        .expect("selected degree was swept");
    let fit = match &chosen.1 {
        Ok(fit) => fit,
        Err(e) => return Err(CliError::Fit(format!("degree {selected_degree}: {e}"))),
    };

    let meta = FitMeta {
        source_label: format!(
            "fit from {}: sex {}, event {}, equipment {}, top {} per class",
            path_buf_name(&args.data),
            config.sex,
            config.event_required,
            config
                .equipment_allowed
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("+"),
            config.top_n
        ),
        r_squared: Some(fit.r_squared),
        sample_size: Some(fit.sample_size as u64),
        snapshot_date: None,
    };
    let model = ScoringModel::new(
        config.sex,
        fit.poly.clone(),
        config.normalization_or_default(),
        (lo, hi),
        (lo, hi),
        Some(meta),
    )
    .map_err(|e| CliError::Fit(format!("degree {selected_degree} fit is not usable: {e}")))?;
    write_file(&args.out_dir, "model.json", model_to_json(&model).as_bytes())?;
    log.note(format!(
        "model.json: degree {selected_degree}, r_squared {}",
        fit.r_squared
    ));

    log.write(&args.out_dir)
}
