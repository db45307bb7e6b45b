//! score: one performance to stdout, or a CSV batch to scored.csv.

use liftscore::diagnostics::score_entries;
use liftscore::ingest::default_class_boundaries;
use liftscore::ModelError;

use crate::cli::ScoreArgs;
use crate::common::{
    ensure_out_dir, fmt2, fmt_raw, load_data, parse_sex, resolve_single_model, write_file,
    CliError, RunLog,
};

pub fn run(args: &ScoreArgs) -> Result<(), CliError> {
    let sex = parse_sex(&args.sex)?;
    let model = resolve_single_model(&args.model, sex)?;

    match (args.bodyweight, args.total, &args.data) {
        (Some(bodyweight), Some(total), None) => {
            let score = model.score(bodyweight, total).map_err(|e| match e {
                ModelError::OutsideExtrapolation { .. } | ModelError::BadScoreInput { .. } => {
                    CliError::Score(e.to_string())
                }
                other => CliError::Score(other.to_string()),
            })?;
            if score.extrapolated {
                let (lo, hi) = model.domain_kg();
                eprintln!(
                    "warning: {bodyweight} kg is outside the fitted range [{lo}, {hi}] kg; points are extrapolated"
                );
            }
            println!("{}", fmt2(score.points));
            Ok(())
        }
        (None, None, Some(data)) => {
            let out_dir = args.out_dir.as_ref().ok_or_else(|| {
                CliError::Config("batch scoring needs --out-dir".to_string())
            })?;
            ensure_out_dir(out_dir)?;
            let mut log = RunLog::new("score");
            let loaded = load_data(data, args.overrides.as_deref())?;
            log.note_load(&loaded);

            let boundaries = default_class_boundaries(model.sex());
            let (scored, skipped) = score_entries(&model, &loaded.entries, boundaries);
            let mut csv_writer = csv::Writer::from_writer(Vec::new());
            csv_writer
                .write_record([
                    "lifter_id",
                    "date",
                    "meet_name",
                    "sex",
                    "class",
                    "bodyweight_kg",
                    "total_kg",
                    "points",
                    "extrapolated",
                ])
                .expect("in-memory CSV write");
            for s in &scored {
                csv_writer
                    .write_record([
                        s.entry.lifter_id.as_str(),
                        &s.entry.date.to_string(),
                        s.entry.meet_name.as_deref().unwrap_or(""),
                        &s.entry.sex.to_string(),
                        s.class_label.as_str(),
                        &fmt_raw(s.entry.bodyweight_kg),
                        &fmt_raw(s.entry.total_kg),
                        &fmt2(s.points),
                        if s.extrapolated { "true" } else { "false" },
                    ])
                    .expect("in-memory CSV write");
            }
            let bytes = csv_writer.into_inner().expect("in-memory CSV flush");
            write_file(out_dir, "scored.csv", &bytes)?;

            if !skipped.is_empty() {
                eprintln!(
                    "warning: {} rows were not scored (reasons in run.log)",
                    skipped.len()
                );
                for skip in &skipped {
                    log.note(format!(
                        "skipped: {} ({} kg, {}): {}",
                        skip.lifter_id, skip.bodyweight_kg, skip.date, skip.reason
                    ));
                }
            }
            log.note(format!("scored: {} rows", scored.len()));
            log.write(out_dir)
        }
        _ => Err(CliError::Config(
            "score takes either --bodyweight with --total, or --data with --out-dir".to_string(),
        )),
    }
}
