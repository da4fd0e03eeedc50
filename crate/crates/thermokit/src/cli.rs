//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::stages::{self, Ctx};

#[derive(Debug, Parser)]
#[command(name = "thermokit", version, about = "Smart-thermostat trace analysis: comfort, thermal parameters, deficiencies and sensor-count regressions")]
pub struct Cli {
    #[command(subcommand)]
    pub stage: Stage,
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Stage {
    /// Normalize traces, report season windows and metadata penetration.
    Ingest,
    /// Comfort indices, deviations and DR-event comfort (Tables 1-3).
    Comfort,
    /// Extract free-floating periods.
    Ffp,
    /// Fit RC, RQ and RK per room.
    Identify,
    /// Flag room deficiencies from identified parameters (Tables 4-5).
    Deficiency,
    /// Build the hourly panel and fit the fixed-effects models (Tables 6-8).
    Panel,
    /// Generate synthetic houses with known parameters.
    Synth,
    /// Run ingest, comfort, ffp, identify, deficiency and panel.
    All,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Comfort => "comfort",
            Stage::Ffp => "ffp",
            Stage::Identify => "identify",
            Stage::Deficiency => "deficiency",
            Stage::Panel => "panel",
            Stage::Synth => "synth",
            Stage::All => "all",
        }
    }
}

#[derive(Serialize)]
struct Diagnostics<'a> {
    stage: &'a str,
    context: &'a str,
    error: String,
    kind: String,
}

fn execute(stage: Stage, ctx: &Ctx) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.params.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match stage {
        Stage::Ingest => stages::ingest::run(ctx),
        Stage::Comfort => stages::comfort::run(ctx),
        Stage::Ffp => stages::ffp::run(ctx),
        Stage::Identify => stages::identify::run(ctx),
        Stage::Deficiency => stages::deficiency::run(ctx),
        Stage::Panel => stages::panel::run(ctx),
        Stage::Synth => stages::synth::run(ctx),
        Stage::All => stages::all::run(ctx),
    })
}

fn write_diagnostics(ctx: &Ctx, stage: Stage, err: &Error) {
    let Error::Core { context, source } = err else { return };
    let d = Diagnostics { stage: stage.name(), context, error: source.to_string(), kind: format!("{source:?}") };
    let dir = ctx.stage_dir(stage.name());
    let written = std::fs::create_dir_all(&dir).and_then(|_| {
        let text = serde_json::to_string_pretty(&d).unwrap_or_default();
        std::fs::write(dir.join("diagnostics.json"), text + "\n")
    });
    if let Err(e) = written {
        log::error!("cannot write diagnostics to {}: {e}", dir.display());
    }
}

/// Parses `args`, runs the stage and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("THERMOKIT_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let config = match &cli.config {
        Some(path) => RunConfig::load(path).map(|file| file.overlay(&cli.run)),
        None => Ok(cli.run.clone()),
    };
    let ctx = match config.and_then(Ctx::new) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(cli.stage, &ctx) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            if code == 3 {
                write_diagnostics(&ctx, cli.stage, &e);
            }
            code
        }
    }
}
