use clap::Parser;

mod cli;
mod cmd_bias;
mod cmd_curve;
mod cmd_diagnose;
mod cmd_fit;
mod cmd_rank;
mod cmd_score;
mod common;

fn main() {
    let parsed = cli::Cli::parse();
    let result = match &parsed.command {
        cli::Command::Fit(args) => cmd_fit::run(args),
        cli::Command::Score(args) => cmd_score::run(args),
        cli::Command::Rank(args) => cmd_rank::run(args),
        cli::Command::Diagnose(args) => cmd_diagnose::run(args),
        cli::Command::BiasExperiment(args) => cmd_bias::run(args),
        cli::Command::Curve(args) => cmd_curve::run(args),
    };
    if let Err(e) = result {
        // One structured line so scripts can match on kind and message.
        eprintln!("error[{}]: {}", e.kind(), e.message());
        std::process::exit(e.exit_code());
    }
}
