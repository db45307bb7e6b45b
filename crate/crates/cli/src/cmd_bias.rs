//! bias-experiment: the same degree fitted with and without the
//! bodyweight window, both curves applied to the unrestricted sample.

use liftscore::diagnostics::bias_experiment;
use liftscore::ingest::FilterConfig;

use crate::cli::BiasExperimentArgs;
use crate::common::{
    ensure_out_dir, fmt_raw, load_data, parse_degrees, write_file, write_json, CliError, RunLog,
};

pub fn run(args: &BiasExperimentArgs) -> Result<(), CliError> {
    let full = FilterConfig::read(&args.filter_config)?;
    let restricted = FilterConfig::read(&args.filter_config2)?;
    let degrees = parse_degrees(&args.degrees)?;
    if degrees.len() != 1 {
        return Err(CliError::Config(format!(
            "bias-experiment fits exactly one degree, got --degrees {:?}",
            args.degrees
        )));
    }

    ensure_out_dir(&args.out_dir)?;
    let mut log = RunLog::new("bias-experiment");
    let loaded = load_data(&args.data, args.overrides.as_deref())?;
    log.note_load(&loaded);

    let report = bias_experiment(&loaded.entries, &full, &restricted, degrees[0])?;
    write_json(&args.out_dir, "bias_experiment.json", &report)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["class", "lifters", "spread_full", "spread_restricted"])
        .expect("in-memory CSV write");
    for row in &report.class_spread {
        w.write_record([
            row.class_label.as_str(),
            &row.lifters.to_string(),
            &row.spread_full.map(fmt_raw).unwrap_or_default(),
            &row.spread_restricted.map(fmt_raw).unwrap_or_default(),
        ])
        .expect("in-memory CSV write");
    }
    write_file(
        &args.out_dir,
        "class_spread.csv",
        &w.into_inner().expect("in-memory CSV flush"),
    )?;

    log.note(format!(
        "full arm: {} points, r_squared {}",
        report.full.sample_size, report.full.r_squared
    ));
    log.note(format!(
        "restricted arm: {} points, r_squared {}",
        report.restricted.sample_size, report.restricted.r_squared
    ));
    log.write(&args.out_dir)
}
