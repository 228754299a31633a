use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: missing files, invalid config, unknown ids.
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Internal(String),
}

impl From<coevolve_core::graph::GraphError> for CliError {
    fn from(e: coevolve_core::graph::GraphError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<coevolve_core::curvature::CurvatureError> for CliError {
    fn from(e: coevolve_core::curvature::CurvatureError) -> Self {
        use coevolve_core::curvature::CurvatureError as E;
        match e {
            E::Graph(g) => g.into(),
            E::InvalidAlpha(_) => CliError::User(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<coevolve_core::train_eval::TrainError> for CliError {
    fn from(e: coevolve_core::train_eval::TrainError) -> Self {
        use coevolve_core::train_eval::TrainError as E;
        match e {
            E::Config(_) | E::Checkpoint(_) | E::Version { .. } | E::Io(_) => CliError::User(e.to_string()),
            E::Graph(g) => g.into(),
            E::Curvature(c) => c.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "coevolve", version, about = "Co-evolving curved embeddings for user-item interaction streams")]
struct Cli {
    /// Worker threads for Ricci precomputation and evaluation.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// More logging on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

/// Source of the run configuration shared by most commands.
#[derive(Args, Debug, Default)]
pub struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Interaction CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Ricci cache directory.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

macro_rules! overrides {
    ($($field:ident),* $(,)?) => {
        /// Per-key overrides of config file values.
        #[derive(Args, Debug, Default)]
        pub struct Overrides {
            $(
                #[arg(long, value_name = "VALUE", help_heading = "Config overrides")]
                $field: Option<String>,
            )*
        }

        impl Overrides {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field), v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

overrides!(
    split, n_intervals, epochs, learning_rate, embedding_dim, fusion_mode, pooling, layers,
    neg_rate, neg_per_positive, sample_ratio, alpha, observe_iterations, cumulative, seed,
    patience, mode, initial_kappa, static_kappa_user, static_kappa_item, curvature_bound,
    fd_r, fd_t, eval_k, max_norm,
);

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(d) = &self.data {
            cfg.dataset = Some(d.clone());
        }
        if let Some(c) = &self.cache {
            cfg.cache_dir = Some(c.clone());
        }
        for (k, v) in self.overrides.pairs() {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a CSV, print a report and write the normalized dataset.
    Ingest {
        data: PathBuf,
        /// Output directory for dataset.csv and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report only; write nothing.
        #[arg(long)]
        dry_run: bool,
    },
    /// Compute and cache per-interval Ricci curvature for the training split.
    PrecomputeRicci {
        #[command(flatten)]
        common: Common,
        /// Interval counts to precompute (repeatable); defaults to n_intervals.
        #[arg(long = "intervals")]
        intervals: Vec<usize>,
    },
    /// Train on the chronological training split.
    Train {
        #[command(flatten)]
        common: Common,
        /// Output directory for model.json, metrics.jsonl and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compute Ricci entries that are not cached instead of failing.
        #[arg(long)]
        compute_missing: bool,
    },
    /// Rank the test split with a checkpoint.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Extra Recall@k cutoffs (Recall@10 is always reported).
        #[arg(long)]
        k: Vec<usize>,
    },
    /// Curvature and degree statistics of a dataset.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Gromov δ-hyperbolicity of projected interval subgraphs.
        #[arg(long)]
        delta: bool,
        /// Degree histograms per side.
        #[arg(long)]
        degrees: bool,
        /// Ollivier-Ricci summary per interval subgraph.
        #[arg(long)]
        ricci: bool,
        #[arg(long, default_value = "both")]
        side: String,
        /// start, middle, end or all.
        #[arg(long, default_value = "all")]
        interval: String,
        /// Largest subgraph the exact δ computation accepts.
        #[arg(long, default_value_t = 300)]
        node_cap: usize,
    },
    /// Top-k items for one user.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// User id as it appears in the CSV.
        #[arg(long)]
        user: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::User("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Ingest { data, out, dry_run } => commands::ingest(&data, out.as_deref(), dry_run),
        Command::PrecomputeRicci { common, intervals } => {
            commands::precompute_ricci(&common.resolve()?, &intervals)
        }
        Command::Train {
            common,
            out,
            compute_missing,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(o) = out {
                cfg.out_dir = Some(o);
            }
            commands::train(&cfg, compute_missing)
        }
        Command::Evaluate { common, checkpoint, k } => commands::evaluate(&common.resolve()?, &checkpoint, &k),
        Command::Analyze {
            common,
            delta,
            degrees,
            ricci,
            side,
            interval,
            node_cap,
        } => commands::analyze(
            &common.resolve()?,
            commands::AnalyzeOpts {
                delta,
                degrees,
                ricci,
                side,
                interval,
                node_cap,
            },
        ),
        Command::Predict {
            common,
            checkpoint,
            user,
            k,
        } => commands::predict(&common.resolve()?, &checkpoint, &user, k),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::User(_) => ExitCode::from(2),
                CliError::Internal(_) => ExitCode::from(1),
            }
        }
    }
}
