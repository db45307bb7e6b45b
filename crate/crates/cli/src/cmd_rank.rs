//! rank: score a result CSV under one model per sex and order everyone
//! by points (ties go to the lighter lifter, then lexicographic id).

use std::collections::BTreeMap;

use liftscore::diagnostics::{score_entries, ScoredEntry};
use liftscore::ingest::default_class_boundaries;
use liftscore::model::Sex;
use liftscore::ScoringModel;

use crate::cli::RankArgs;
use crate::common::{
    ensure_out_dir, fmt2, fmt_raw, load_data, parse_sex, resolve_models, write_file, CliError,
    RunLog,
};

fn models_by_sex(args: &RankArgs) -> Result<BTreeMap<String, ScoringModel>, CliError> {
    let sex = parse_sex(&args.sex)?;
    let mut models = resolve_models(&args.model, sex)?;
    if let Some(second) = &args.model2 {
        let more = resolve_models(second, None)?;
        if more.len() != 1 {
            return Err(CliError::Config(format!(
                "--model2 {second:?} is sex-generic; use a sex-specific name or file"
            )));
        }
        models.extend(more);
    }
    let mut by_sex = BTreeMap::new();
    for model in models {
        let key = model.sex().to_string();
        if by_sex.insert(key, model).is_some() {
            return Err(CliError::Config(
                "two models resolve to the same sex; rank needs at most one per sex".to_string(),
            ));
        }
    }
    Ok(by_sex)
}

pub fn run(args: &RankArgs) -> Result<(), CliError> {
    let by_sex = models_by_sex(args)?;
    ensure_out_dir(&args.out_dir)?;
    let mut log = RunLog::new("rank");
    let loaded = load_data(&args.data, args.overrides.as_deref())?;
    log.note_load(&loaded);

    let mut scored: Vec<ScoredEntry> = Vec::new();
    let mut skipped_total = 0usize;
    for sex in [Sex::M, Sex::F] {
        let of_sex: Vec<_> = loaded
            .entries
            .iter()
            .filter(|e| e.sex == sex)
            .cloned()
            .collect();
        if of_sex.is_empty() {
            continue;
        }
        match by_sex.get(&sex.to_string()) {
            Some(model) => {
                let (mut ok, skips) = score_entries(model, &of_sex, default_class_boundaries(sex));
                for skip in &skips {
                    log.note(format!(
                        "skipped: {} ({} kg, {}): {}",
                        skip.lifter_id, skip.bodyweight_kg, skip.date, skip.reason
                    ));
                }
                skipped_total += skips.len();
                scored.append(&mut ok);
            }
            None => {
                skipped_total += of_sex.len();
                log.note(format!(
                    "skipped: {} rows of sex {sex} (no model loaded for sex {sex})",
                    of_sex.len()
                ));
            }
        }
    }
    if skipped_total > 0 {
        eprintln!("warning: {skipped_total} rows were not ranked (reasons in run.log)");
    }

    scored.sort_by(|a, b| {
        b.points
            .total_cmp(&a.points)
            .then(a.entry.bodyweight_kg.total_cmp(&b.entry.bodyweight_kg))
            .then(a.entry.lifter_id.cmp(&b.entry.lifter_id))
            .then(a.entry.date.cmp(&b.entry.date))
    });

    let render = |rows: &[ScoredEntry]| -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "rank",
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
        for (i, s) in rows.iter().enumerate() {
            let rank = (i + 1).to_string();
            let date = s.entry.date.to_string();
            let sex = s.entry.sex.to_string();
            w.write_record([
                rank.as_str(),
                s.entry.lifter_id.as_str(),
                date.as_str(),
                s.entry.meet_name.as_deref().unwrap_or(""),
                sex.as_str(),
                s.class_label.as_str(),
                &fmt_raw(s.entry.bodyweight_kg),
                &fmt_raw(s.entry.total_kg),
                &fmt2(s.points),
                if s.extrapolated { "true" } else { "false" },
            ])
            .expect("in-memory CSV write");
        }
        w.into_inner().expect("in-memory CSV flush")
    };

    write_file(&args.out_dir, "ranked.csv", &render(&scored))?;
    let k = args.top_k.min(scored.len());
    write_file(&args.out_dir, "topk.csv", &render(&scored[..k]))?;
    log.note(format!("ranked: {} rows, topk: {k}", scored.len()));
    log.write(&args.out_dir)
}
