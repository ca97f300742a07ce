use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ibcolor_cli::{cmd_crossval, cmd_curve, cmd_eval, cmd_export, cmd_ingest, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "ibcolor", version, about = "Information Bottleneck analysis of color naming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Parse survey files into encoders, reference priors and the source.
    Ingest,
    /// Anneal the IB curve for the ingested source.
    Curve,
    /// Score every language against the curve.
    Eval,
    /// k-fold cross-validation over languages.
    Crossval,
    /// Naming grids and centroids for one language and its IB match.
    Export,
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    chips: Option<PathBuf>,
    #[arg(long, global = true)]
    lab: Option<PathBuf>,
    #[arg(long, global = true)]
    terms: Option<PathBuf>,
    /// Term file whose rows are ingested as language 111.
    #[arg(long, global = true)]
    english: Option<PathBuf>,
    #[arg(long, global = true)]
    sigma_sq: Option<f64>,
    #[arg(long, global = true)]
    beta_min: Option<f64>,
    #[arg(long, global = true)]
    beta_max: Option<f64>,
    #[arg(long, global = true)]
    beta_steps: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    language: Option<u32>,
    #[arg(long, global = true)]
    folds: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let f = cli.flags;
    let mut cfg = match &f.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.code as u8);
            }
        },
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        out_dir: f.out,
        chip_file: f.chips,
        lab_file: f.lab,
        term_file: f.terms,
        english_file: f.english,
        sigma_sq: f.sigma_sq,
        beta_min: f.beta_min,
        beta_max: f.beta_max,
        beta_steps: f.beta_steps,
        seed: f.seed,
        language: f.language,
        folds: f.folds,
    });
    let result = match cli.command {
        Command::Ingest => cmd_ingest(&cfg).map(|_| ()),
        Command::Curve => cmd_curve(&cfg).map(|_| ()),
        Command::Eval => cmd_eval(&cfg).map(|_| ()),
        Command::Crossval => cmd_crossval(&cfg).map(|_| ()),
        Command::Export => cmd_export(&cfg).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
