//! `teamtalk`: validate, score, analyse and model team-chat corpora.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use teamtalk::pipeline::Mode;
use teamtalk::Objective;

#[derive(Debug, Parser)]
#[command(name = "teamtalk", version, about = "Constructiveness analysis of team chat games")]
struct Cli {
    /// Worker threads for per-game stages. Defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Full,
    Early20,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Early20 => Mode::Early20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveArg {
    Pp,
    P,
    Mm,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Pp => Objective::Best,
            ObjectiveArg::P => Objective::Constructive,
            ObjectiveArg::Mm => Objective::Worst,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorpusArgs {
    /// JSONL corpus, one game per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Directory of lexicon files. Defaults to the built-in lexicons.
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    /// Output directory. Not part of the config hash.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Reject near-truth guesses even without window-focus telemetry.
    #[arg(long)]
    pub strict_cheat: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "p")]
    pub objective: ObjectiveArg,
    #[arg(long, value_enum, default_value = "full")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Puzzle-aware train/validation splits.
    #[arg(long, default_value_t = 20)]
    pub n_iter: usize,
    #[arg(long, default_value_t = 0.8)]
    pub train_frac: f64,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Check every line against the schema and report the quality filters.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicons: Option<PathBuf>,
        /// Write validation.json here.
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
        #[arg(long)]
        strict_cheat: bool,
    },
    /// Per-game scores and constructiveness.
    Score {
        #[command(flatten)]
        io: CorpusArgs,
    },
    /// Idea graphs, convergence and score profiles, constructiveness histogram.
    Analyze {
        #[command(flatten)]
        io: CorpusArgs,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Also write the histogram as SVG.
        #[arg(long)]
        svg: bool,
        /// Marker moves per convergence and score profile.
        #[arg(long, default_value_t = 3)]
        profile_len: usize,
    },
    /// Feature table for every retained game.
    Featurize {
        #[command(flatten)]
        io: CorpusArgs,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[arg(long, default_value_t = 2)]
        pos_n: usize,
        #[arg(long, default_value_t = 2)]
        min_df: usize,
    },
    /// Select settings and fit the final models.
    Train {
        #[command(flatten)]
        io: CorpusArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Cross-validated AUC per feature set with permutation p-values.
    Evaluate {
        #[command(flatten)]
        io: CorpusArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 5000)]
        n_perm: usize,
        /// Extra resampled splits for a variance estimate.
        #[arg(long, default_value_t = 0)]
        bootstrap_splits: usize,
        /// Reuse the settings of a trained model instead of searching.
        #[arg(long = "model")]
        model_path: Option<PathBuf>,
    },
    /// Collect evaluation reports into one table.
    Report {
        /// Files written by `evaluate`.
        #[arg(long, num_args = 1.., required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        #[serde(skip)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with planted signal.
    Synth {
        #[arg(long)]
        #[serde(skip)]
        out: PathBuf,
        #[arg(long, default_value_t = 400)]
        n_games: usize,
        #[arg(long, default_value_t = 40)]
        n_puzzles: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<commands::UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
