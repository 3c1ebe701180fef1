use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use satqoe::commands;
use satqoe::config::Loaded;
use satqoe::core::features::FeatureSet;
use satqoe::core::regression::ModelKind;
use satqoe::{Error, Result};

#[derive(Parser)]
#[command(name = "satqoe", version, about = "Streaming QoE prediction from network traffic")]
struct Cli {
    /// Pipeline config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse captures or trace CSVs into normalized traces and interval counts.
    Ingest,
    /// Compute feature tables from ingested traces.
    Features {
        /// Only this feature set (baseline, b1s, b1s3s).
        #[arg(long)]
        feature_set: Option<FeatureSet>,
    },
    /// Recover MOS from raw ratings and screen continuous raters.
    Subjective,
    /// Run the content-disjoint benchmark.
    Eval {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated model kinds (MLR, DT, RF, SVR).
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<ModelKind>>,
        /// Comma-separated feature sets.
        #[arg(long, value_delimiter = ',')]
        feature_sets: Option<Vec<FeatureSet>>,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Apply a saved model to a feature CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score external predictions (`video_id,<value>`) against MOS.
    ScoreExternal {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        mos: PathBuf,
        /// MOS column when reading a `satqoe subjective` table.
        #[arg(long, default_value = "mos")]
        column: String,
    },
}

fn load(cli: &Cli) -> Result<Loaded> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Usage("this command needs --config PATH".into()))?;
    let mut loaded = Loaded::from_path(path)?;
    loaded.output_override = cli.out.clone();
    Ok(loaded)
}

fn run(cli: Cli) -> Result<Option<String>> {
    let summary = match &cli.command {
        Command::Ingest => commands::cmd_ingest(&load(&cli)?)?,
        Command::Features { feature_set } => commands::cmd_features(&load(&cli)?, *feature_set)?,
        Command::Subjective => commands::cmd_subjective(&load(&cli)?)?,
        Command::Eval { seed, trials, models, feature_sets, threads } => {
            let mut cfg = load(&cli)?;
            let c = &mut cfg.config;
            if let Some(s) = seed {
                c.seed = *s;
            }
            if let Some(t) = trials {
                c.eval.trials = *t;
            }
            if let Some(m) = models {
                c.eval.models = m.clone();
            }
            if let Some(f) = feature_sets {
                c.features.sets = f.clone();
            }
            if let Some(t) = threads {
                c.eval.threads = *t;
            }
            satqoe::config::validate(c)?;
            commands::cmd_eval(&cfg)?
        }
        Command::Predict { model, features, output } => {
            let (summary, csv) = commands::cmd_predict(model, features, output.as_deref())?;
            if output.is_none() {
                print!("{csv}");
                return Ok(None);
            }
            summary
        }
        Command::ScoreExternal { predictions, mos, column } => commands::cmd_score_external(predictions, mos, column)?,
    };
    Ok(Some(serde_json::to_string_pretty(&summary).expect("summary serializes")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Some(text)) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.summary()).expect("summary serializes"));
            ExitCode::FAILURE
        }
    }
}
