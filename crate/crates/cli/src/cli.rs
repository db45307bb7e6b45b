//! Command line surface. Flag names are shared across subcommands so
//! invocations compose predictably.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "liftscore",
    version,
    about = "Fit, apply and audit bodyweight-adjusted scoring models for powerlifting totals",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Select a fit sample from a result CSV, fit one or more degrees,
    /// and save the chosen degree as a model file
    Fit(FitArgs),
    /// Score one performance (prints points) or a whole CSV (writes scored.csv)
    Score(ScoreArgs),
    /// Score a CSV and rank everyone by points
    Rank(RankArgs),
    /// Fairness and shape diagnostics for a model over a scored population
    Diagnose(DiagnoseArgs),
    /// Fit the same degree with and without the bodyweight window and
    /// compare how each curve spreads the classes
    BiasExperiment(BiasExperimentArgs),
    /// Tabulate a model's curve, its derivative and the points multiplier
    Curve(CurveArgs),
}

#[derive(Args)]
pub struct FitArgs {
    /// Result CSV (Name, Sex, Equipment, BodyweightKg, TotalKg, Date, Event, [MeetName])
    #[arg(long)]
    pub data: PathBuf,
    /// Selection settings JSON
    #[arg(long)]
    pub filter_config: PathBuf,
    /// Bodyweight overrides CSV (lifter_id, meet_name, bodyweight_kg, note)
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Degrees to fit: "4", "2,3,4" or "2..5"
    #[arg(long, default_value = "4")]
    pub degrees: String,
    /// Degree whose fit becomes model.json (default: 4 when fitted)
    #[arg(long)]
    pub select: Option<usize>,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct ScoreArgs {
    /// Model file path or built-in name (wilks-classic, revised-2019-m, revised-2019-f)
    #[arg(long)]
    pub model: String,
    /// Sex to resolve a sex-generic built-in name with
    #[arg(long)]
    pub sex: Option<String>,
    /// Bodyweight in kg (single-score mode, with --total)
    #[arg(long)]
    pub bodyweight: Option<f64>,
    /// Total in kg (single-score mode, with --bodyweight)
    #[arg(long)]
    pub total: Option<f64>,
    /// Result CSV to score (batch mode, with --out-dir)
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Bodyweight overrides CSV
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Output directory for batch mode
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct RankArgs {
    /// Model file path or built-in name; plain "wilks-classic" loads both sexes
    #[arg(long)]
    pub model: String,
    /// Second model for the other sex
    #[arg(long)]
    pub model2: Option<String>,
    /// Sex to resolve a sex-generic built-in name with (restricts ranking to that sex)
    #[arg(long)]
    pub sex: Option<String>,
    /// Result CSV to rank
    #[arg(long)]
    pub data: PathBuf,
    /// Bodyweight overrides CSV
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Rows in topk.csv
    #[arg(long, default_value_t = 25)]
    pub top_k: usize,
    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    /// Model file path or built-in name
    #[arg(long)]
    pub model: String,
    /// Second model to diagnose side by side (files suffixed _2)
    #[arg(long)]
    pub model2: Option<String>,
    /// Sex to resolve a sex-generic built-in name with
    #[arg(long)]
    pub sex: Option<String>,
    /// Result CSV with the population to score
    #[arg(long)]
    pub data: PathBuf,
    /// When given, diagnose the selection sample this config produces;
    /// otherwise all parseable rows of the model's sex are scored
    #[arg(long)]
    pub filter_config: Option<PathBuf>,
    /// Bodyweight overrides CSV
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Entries in the top-k concentration check
    #[arg(long, default_value_t = 25)]
    pub top_k: usize,
    /// Derivative scan step in kg
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    /// |score-vs-bodyweight slope| above this is flagged unfair (points/kg)
    #[arg(long, default_value_t = 0.15)]
    pub fairness_slope: f64,
    /// |derivative| below this counts as a plateau (kg/kg)
    #[arg(long, default_value_t = 0.5)]
    pub plateau_threshold: f64,
    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct BiasExperimentArgs {
    /// Result CSV
    #[arg(long)]
    pub data: PathBuf,
    /// Selection settings for the unrestricted arm
    #[arg(long)]
    pub filter_config: PathBuf,
    /// Selection settings for the restricted (windowed) arm
    #[arg(long)]
    pub filter_config2: PathBuf,
    /// Single degree to fit in both arms
    #[arg(long, default_value = "4")]
    pub degrees: String,
    /// Bodyweight overrides CSV
    #[arg(long)]
    pub overrides: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct CurveArgs {
    /// Model file path or built-in name
    #[arg(long)]
    pub model: String,
    /// Sex to resolve a sex-generic built-in name with
    #[arg(long)]
    pub sex: Option<String>,
    /// Tabulation step in kg
    #[arg(long, default_value_t = 0.5)]
    pub grid_step: f64,
    /// Write curve.csv here instead of printing to stdout
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
