mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Format, Mode};
use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "scalescope",
    version,
    about = "Multi-scale entropy analysis of discrete descriptions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SearchTuning {
    /// Seed for the fundamental-scale search
    #[arg(long, env = "SCALESCOPE_SEED", default_value_t = 0)]
    seed: u64,

    /// Independent restarts per initialization
    #[arg(long, default_value_t = 6)]
    restarts: usize,

    /// Maximum improvement passes per restart
    #[arg(long, default_value_t = 48)]
    max_passes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Per-file reports at one or more observation scales
    Analyze {
        /// Input files
        paths: Vec<PathBuf>,

        /// Observation scale: chars, words, bits, ngram:N or fundamental (repeatable)
        #[arg(long = "scale", value_name = "SCALE", default_values_t = [String::from("chars"), String::from("words")])]
        scales: Vec<String>,

        /// Treat inputs as UTF-8 text or raw bytes
        #[arg(long, value_enum, default_value = "text")]
        mode: Mode,

        /// Output format for the report table
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,

        /// Directory for profile sidecars of fundamental-scale rows
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,

        #[command(flatten)]
        tuning: SearchTuning,
    },

    /// Fundamental-scale search on one file, writing profile, segment and trace artifacts
    Search {
        path: PathBuf,

        /// Treat the input as UTF-8 text or raw bytes
        #[arg(long, value_enum, default_value = "text")]
        mode: Mode,

        /// Also compute the exhaustive optimum (input must fit the cap)
        #[arg(long)]
        oracle: bool,

        /// Unit cap for exhaustive enumeration
        #[arg(long, default_value_t = scalescope::DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,

        /// Output directory for artifacts
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,

        #[command(flatten)]
        tuning: SearchTuning,
    },

    /// Collapse a ranked profile JSON onto a coarser scale
    Downgrade {
        /// Profile JSON (or previously downgraded JSON) to reduce
        profile: PathBuf,

        /// Target point count
        #[arg(long, value_name = "S")]
        target: usize,

        /// Output directory for the downgraded JSON and plot TSV
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },

    /// Scale report of a 2D grid under a tiling
    Grid {
        /// Grid file: `W H` then H rows of W palette symbols
        grid: PathBuf,

        /// Tiling file: `W H` then region ids (or `cells`), optional class map
        tiling: PathBuf,

        /// Treat patterns as equivalent under rotation and reflection
        #[arg(long)]
        rotations: bool,
    },

    /// Batch table over every file under a directory
    Corpus {
        dir: PathBuf,

        /// Observation scale (repeatable)
        #[arg(long = "scale", value_name = "SCALE", default_values_t = [String::from("chars"), String::from("words"), String::from("fundamental")])]
        scales: Vec<String>,

        /// Treat inputs as UTF-8 text or raw bytes
        #[arg(long, value_enum, default_value = "text")]
        mode: Mode,

        /// Output format for the report table
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,

        #[command(flatten)]
        tuning: SearchTuning,
    },
}

fn manifest_for(cli: &Command) -> RunManifest {
    let version = env!("CARGO_PKG_VERSION").to_string();
    let base = RunManifest {
        command: String::new(),
        inputs: Vec::new(),
        scales: Vec::new(),
        mode: "text".into(),
        seed: 0,
        restarts: 6,
        max_passes: 48,
        oracle_cap: scalescope::DEFAULT_ORACLE_CAP,
        format: "tsv".into(),
        out: None,
        target_points: None,
        version,
    };
    match cli {
        Command::Analyze { paths, scales, mode, format, out, tuning } => RunManifest {
            command: "analyze".into(),
            inputs: paths.iter().map(|p| p.display().to_string()).collect(),
            scales: scales.clone(),
            mode: mode.label().into(),
            seed: tuning.seed,
            restarts: tuning.restarts,
            max_passes: tuning.max_passes,
            format: format.label().into(),
            out: out.as_ref().map(|p| p.display().to_string()),
            ..base
        },
        Command::Search { path, mode, oracle: _, oracle_cap, out, tuning } => RunManifest {
            command: "search".into(),
            inputs: vec![path.display().to_string()],
            scales: vec!["fundamental".into()],
            mode: mode.label().into(),
            seed: tuning.seed,
            restarts: tuning.restarts,
            max_passes: tuning.max_passes,
            oracle_cap: *oracle_cap,
            format: "json".into(),
            out: Some(out.display().to_string()),
            ..base
        },
        Command::Downgrade { profile, target, out } => RunManifest {
            command: "downgrade".into(),
            inputs: vec![profile.display().to_string()],
            format: "json".into(),
            out: Some(out.display().to_string()),
            target_points: Some(*target),
            ..base
        },
        Command::Grid { grid, tiling, rotations: _ } => RunManifest {
            command: "grid".into(),
            inputs: vec![grid.display().to_string(), tiling.display().to_string()],
            format: "json".into(),
            ..base
        },
        Command::Corpus { dir, scales, mode, format, tuning } => RunManifest {
            command: "corpus".into(),
            inputs: vec![dir.display().to_string()],
            scales: scales.clone(),
            mode: mode.label().into(),
            seed: tuning.seed,
            restarts: tuning.restarts,
            max_passes: tuning.max_passes,
            format: format.label().into(),
            ..base
        },
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let manifest = manifest_for(&cli.command);
    match &cli.command {
        Command::Analyze { paths, scales, mode, format, out, .. } => {
            commands::cmd_analyze(paths, scales, *mode, *format, out.as_deref(), &manifest)
        }
        Command::Search { path, mode, oracle, out, .. } => {
            commands::cmd_search(path, *mode, *oracle, out, &manifest)
        }
        Command::Downgrade { profile, target, out } => {
            commands::cmd_downgrade(profile, *target, out, &manifest)
        }
        Command::Grid { grid, tiling, rotations } => {
            commands::cmd_grid(grid, tiling, *rotations, &manifest)
        }
        Command::Corpus { dir, scales, mode, format, .. } => {
            commands::cmd_corpus(dir, scales, *mode, *format, &manifest)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; usage problems exit with 1
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}
