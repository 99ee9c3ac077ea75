use std::fs;
use std::io::{self, Write};
use std::num::NonZeroU64;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flyby::netlang::{parse_network_with_diagnostics, Severity};
use flyby::scenario::config::BODY_PRESETS;
use flyby::scenario::{
    emit, scenario_document, sweep_document, OutputFormat, Sampling, ScenarioConfig,
    ScenarioError, SweepSpec,
};
use flyby::Execution;

#[derive(Parser)]
#[command(name = "flyby", version, about = "Flyby-anomaly shifts and interferometer detection statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario
    Scenario(RunArgs),
    /// Evaluate a scenario over a parameter grid
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// <param>:<from>:<to>:<steps>[:log]
        #[arg(long)]
        sweep: SweepSpec,
        /// Evaluate steps one after another
        #[arg(long)]
        sequential: bool,
    },
    /// Check a .ifo network description
    Parse {
        file: PathBuf,
        /// Print the canonical form on success
        #[arg(long)]
        format: bool,
    },
    /// List built-in parameter sets
    Presets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<NonZeroU64>,
    /// Significance for the required-quanta estimate
    #[arg(long)]
    z: Option<f64>,
}

impl RunArgs {
    fn load(&self) -> Result<ScenarioConfig, ScenarioError> {
        let mut config = ScenarioConfig::from_file(&self.config)?;
        match (self.shots, config.sampling.as_mut()) {
            (Some(shots), Some(s)) => s.shots = shots,
            (Some(shots), None) => {
                config.sampling = Some(Sampling {
                    shots,
                    seed: self.seed.unwrap_or(0),
                })
            }
            (None, None) if self.seed.is_some() => {
                return Err(ScenarioError::Config {
                    key: "--seed".into(),
                    message: "needs --shots or sampling.shots".into(),
                })
            }
            _ => {}
        }
        if let (Some(seed), Some(s)) = (self.seed, config.sampling.as_mut()) {
            s.seed = seed;
        }
        if self.z.is_some() {
            config.z = self.z;
        }
        config.validate()?;
        Ok(config)
    }

    fn write(&self, doc: &flyby::scenario::ReportDocument) -> Result<(), ScenarioError> {
        let io_err = |path: PathBuf| move |e: io::Error| ScenarioError::Io {
            path,
            message: e.to_string(),
        };
        match &self.out {
            Some(path) => {
                let mut buf = Vec::new();
                emit(doc, self.format, &mut buf).map_err(io_err(path.clone()))?;
                fs::write(path, buf).map_err(io_err(path.clone()))
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                emit(doc, self.format, &mut lock)
                    .and_then(|_| lock.flush())
                    .map_err(io_err(PathBuf::from("<stdout>")))
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), ScenarioError> {
    match cli.command {
        Command::Scenario(args) => {
            let config = args.load()?;
            args.write(&scenario_document(&config)?)
        }
        Command::Sweep {
            run,
            sweep,
            sequential,
        } => {
            let config = run.load()?;
            let execution = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            run.write(&sweep_document(&config, &sweep, execution)?)
        }
        Command::Parse { file, format } => {
            let text = fs::read_to_string(&file).map_err(|e| ScenarioError::Io {
                path: file.clone(),
                message: e.to_string(),
            })?;
            // Rotor statements are checked structurally with a placeholder body.
            let body = flyby::RotatingBody::new(0.0, 1.0).expect("valid");
            let beam = flyby::BeamSource::new(0.0).expect("valid");
            let outcome = parse_network_with_diagnostics(&text, Some(&body), Some(&beam));
            for d in outcome
                .diagnostics
                .iter()
                .filter(|d| d.severity == Severity::Warning)
            {
                eprintln!("{}:{d}", file.display());
            }
            match outcome.network {
                Some(net) => {
                    if format {
                        print!("{}", flyby::format_network(&net));
                    } else {
                        println!(
                            "{}: ok ({} modes, {} elements, {} detectors)",
                            file.display(),
                            net.modes().len(),
                            net.elements().len(),
                            net.detectors().len()
                        );
                    }
                    Ok(())
                }
                None => Err(ScenarioError::Netlang {
                    path: file,
                    diagnostics: outcome
                        .diagnostics
                        .into_iter()
                        .filter(|d| d.is_error())
                        .collect(),
                }),
            }
        }
        Command::Presets => {
            for p in &BODY_PRESETS {
                println!("## {}\n{}", p.name, p.to_config());
            }
            println!("## mach-zehnder\n[network]\npreset = \"mach-zehnder\"");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // Usage errors count as configuration errors (exit 1), not clap's default 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
