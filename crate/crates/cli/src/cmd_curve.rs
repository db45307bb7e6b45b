//! curve: tabulate a model over its scoring interval for plotting or
//! spreadsheet work.

use liftscore::poly::grid_points;

use crate::cli::CurveArgs;
use crate::common::{
    ensure_out_dir, fmt_raw, parse_sex, resolve_single_model, write_file, CliError, RunLog,
};

pub fn run(args: &CurveArgs) -> Result<(), CliError> {
    if !(args.grid_step.is_finite() && args.grid_step > 0.0) {
        return Err(CliError::Config(format!(
            "--grid-step must be positive, got {}",
            args.grid_step
        )));
    }
    let sex = parse_sex(&args.sex)?;
    let model = resolve_single_model(&args.model, sex)?;

    let deriv = model.poly().derivative();
    let (dlo, dhi) = model.domain_kg();
    let (lo, hi) = model.extrapolation_kg();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "bodyweight_kg",
        "curve_total_kg",
        "derivative_kg_per_kg",
        "points_multiplier",
        "extrapolated",
    ])
    .expect("in-memory CSV write");
    for x in grid_points(lo, hi, args.grid_step) {
        let value = model.poly().eval(x).expect("finite grid");
        w.write_record([
            fmt_raw(x),
            fmt_raw(value),
            fmt_raw(deriv.eval(x).expect("finite grid")),
            fmt_raw(model.normalization_points() / value),
            (x < dlo || x > dhi).to_string(),
        ])
        .expect("in-memory CSV write");
    }
    let bytes = w.into_inner().expect("in-memory CSV flush");

    match &args.out_dir {
        Some(dir) => {
            ensure_out_dir(dir)?;
            let mut log = RunLog::new("curve");
            write_file(dir, "curve.csv", &bytes)?;
            log.note(format!("curve.csv: [{lo}, {hi}] kg, step {}", args.grid_step));
            log.write(dir)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            std::io::Write::write_all(&mut stdout, &bytes)
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
            Ok(())
        }
    }
}
