use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bisimp_cli::{cmd_counterexample, cmd_identities, cmd_kan, cmd_theorem1, Construction, RunReport, Source};
use bisimp_core::groups::presets::Preset;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bisimp", version, about = "Exhaustive Kan-condition checks on finite bisimplicial sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// worker threads for independent checks (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// reserved; every search is deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct SourceArgs {
    /// s3-counterexample, z2-commuting or eg-tensor
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    preset: Option<String>,

    /// JSON file with a group, subgroups, or explicit tables
    #[arg(long)]
    input: Option<PathBuf>,
}

impl SourceArgs {
    fn source(&self) -> anyhow::Result<Source> {
        match (&self.preset, &self.input) {
            (Some(p), _) => Ok(Source::Preset(p.parse()?)),
            (None, Some(path)) => Source::load(path),
            (None, None) => Err(anyhow!("give --preset or --input")),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the face/degeneracy identities as ordinal-map equalities.
    Identities {
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
    },
    /// Check that an object's map to the point is a Kan fibration.
    Kan {
        #[command(flatten)]
        source: SourceArgs,
        /// nerve, double-nerve-diagonal, eg-tensor-diagonal, row, column or explicit
        #[arg(long)]
        construction: String,
        /// row or column index; every index up to --max-dim when omitted
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
    },
    /// Fill every pointwise horn through the diagonal, in both directions.
    Theorem1 {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
    },
    /// Emit the certificate for a preset.
    Counterexample {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
    },
}

fn run(cli: &Cli) -> anyhow::Result<RunReport> {
    let mut report = match &cli.command {
        Command::Identities { max_dim } => cmd_identities(*max_dim)?,
        Command::Kan { source, construction, index, max_dim } => {
            let c: Construction = construction.parse()?;
            cmd_kan(&source.source()?, c, *index, *max_dim)?
        }
        Command::Theorem1 { source, max_dim } => cmd_theorem1(&source.source()?, *max_dim)?,
        Command::Counterexample { preset, max_dim } => {
            let p: Preset = preset.parse()?;
            cmd_counterexample(p, *max_dim)?
        }
    };
    report.config.threads = cli.threads;
    report.config.seed = cli.seed;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let out = match cli.format {
        Format::Text => report.to_text(),
        Format::Structured => match serde_json::to_string_pretty(&report).context("serializing report") {
            Ok(j) => j + "\n",
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
    };
    // a closed pipe (e.g. `| head`) is not an error of the run
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    if report.all_as_expected() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
