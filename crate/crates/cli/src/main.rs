mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use commands::{Model, Outcome};
use config::{ConfigError, Format, RunConfig};
use evans_core::Error;
use output::Header;
use std::path::PathBuf;
use std::process::ExitCode;

/// Evans-function and spectral computations for travelling fronts.
#[derive(Parser)]
#[command(name = "evans", version)]
struct Cli {
    #[command(flatten)]
    source: Source,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped configuration by name (see `evans presets`).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Travelling-wave profile on a uniform grid.
    Wave,
    Spectrum {
        #[command(subcommand)]
        kind: SpectrumKind,
    },
    Evans {
        #[command(subcommand)]
        kind: EvansKind,
    },
    /// Crossing counts N(λ) for real λ ≥ 0 (F-KPP, c ≥ 2√δ).
    Crossings,
    /// List the shipped presets.
    Presets,
}

#[derive(Subcommand, Clone, Copy)]
enum SpectrumKind {
    /// Dispersion curves of both ends.
    Continuous,
    /// Absolute-spectrum boundary points in the configured window.
    Absolute,
    /// Region labels on the configured grid.
    Regions,
    /// Exponential-weight sweep.
    Weighted,
}

#[derive(Subcommand, Clone, Copy)]
enum EvansKind {
    /// Evaluate at the configured points, or along the contour when none are given.
    Eval,
    /// Winding number over the configured contour.
    Wind,
}

enum Failure {
    Config(String),
    Numeric(Error),
    Io(std::io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Numeric(Error::ZeroOnContour { .. }) => 3,
            Failure::Numeric(Error::BranchPoint { .. }) => 4,
            Failure::Io(e) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
            Failure::Io(_) => 1,
            _ => 2,
        }
    }
}

fn load(source: &Source) -> Result<RunConfig, Failure> {
    let mut cfg = match (&source.config, &source.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        (None, Some(name)) => config::preset(name)?,
        (None, None) => return Err(Failure::Config("either --config or --preset is required".into())),
    };
    if source.out.is_some() {
        cfg.output.path = source.out.clone();
    }
    if source.format.is_some() {
        cfg.output.format = source.format;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Command::Presets = cli.command {
        let names: String = config::PRESETS.iter().map(|(n, _)| format!("{n}\n")).collect();
        return output::emit(&names, None).map_err(Failure::Io);
    }
    let cfg = load(&cli.source)?;
    let model = Model::build(&cfg)?;
    let (name, outcome, default_format): (&str, Outcome, Format) = match cli.command {
        Command::Wave => ("wave", commands::wave(&cfg, &model), Format::Csv),
        Command::Spectrum { kind } => {
            let (name, o) = match kind {
                SpectrumKind::Continuous => ("spectrum continuous", commands::continuous(&cfg, &model)),
                SpectrumKind::Absolute => ("spectrum absolute", commands::absolute(&cfg, &model)),
                SpectrumKind::Regions => ("spectrum regions", commands::regions(&cfg, &model)),
                SpectrumKind::Weighted => ("spectrum weighted", commands::weighted(&cfg, &model)),
            };
            (name, o, Format::Csv)
        }
        Command::Evans { kind: EvansKind::Eval } => ("evans eval", commands::evans_eval(&cfg, &model)?, Format::Csv),
        Command::Evans { kind: EvansKind::Wind } => ("evans wind", commands::evans_wind(&cfg, &model)?, Format::Json),
        Command::Crossings => ("crossings", commands::crossings(&cfg, &model)?, Format::Csv),
        Command::Presets => unreachable!(),
    };

    let format = cfg.output.format.unwrap_or(default_format);
    let path = cfg.output.path.as_deref();
    let text = output::render(&Header::new(name, &cfg), &outcome.table, outcome.report, format);
    // the winding integer owns standard output
    let wind = name == "evans wind";
    if path.is_some() || !wind {
        output::emit(&text, path).map_err(Failure::Io)?;
    }
    for line in &outcome.summary {
        if path.is_some() || wind {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    for w in &outcome.warnings {
        eprintln!("{w}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code() == 0 => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Config(m) => format!("configuration error: {m}"),
                Failure::Numeric(e) => format!("error: {e}"),
                Failure::Io(e) => format!("i/o error: {e}"),
            };
            eprintln!("{msg}");
            ExitCode::from(f.code())
        }
    }
}
