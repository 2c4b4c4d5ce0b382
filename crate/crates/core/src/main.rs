use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ermakov::run::config::RunConfig;
use ermakov::run::verify::{verify, Suite};
use ermakov::run::{configure_threads, scan, simulate, wigner};
use ermakov::Error;

/// Damped quantum oscillator: wave-packet widths, Riccati routes and Wigner functions.
#[derive(Parser)]
#[command(name = "ermakov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shipped preset name
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<RunConfig, Error> {
        match (&self.config, &self.preset) {
            (Some(p), _) => RunConfig::load(p),
            (None, Some(n)) => RunConfig::preset(n),
            (None, None) => Err(Error::Config("one of --config or --preset is required".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Time series of means, widths, moments, energies and the invariant
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Initial quantum energy of the three branches against the friction coefficient
    ScanGamma {
        #[command(flatten)]
        source: Source,
        /// CSV destination; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-checks closed forms against the numerical oracles
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Wigner function grids with optional Fokker–Planck residuals
    Wigner {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        fp_residual: bool,
        /// Grid refinement levels for the convergence ratios
        #[arg(long, default_value_t = 0, requires = "fp_residual")]
        refine: usize,
    },
}

enum Failure {
    Config(Error),
    Runtime(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::Json(_) => Failure::Config(e),
            e => Failure::Runtime(e),
        }
    }
}

fn load(source: &Source) -> Result<RunConfig, Failure> {
    source.load().map_err(Failure::Config)
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Runtime(ermakov::error::io_error(p)(e)))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { source, out } => {
            let cfg = load(&source)?;
            for p in simulate::simulate(&cfg, &out)? {
                println!("{}", p.display());
            }
        }
        Command::ScanGamma { source, out } => {
            let cfg = load(&source)?;
            let rows = scan::scan_gamma(&cfg)?;
            match out {
                Some(p) => {
                    let mut f = std::io::BufWriter::new(
                        std::fs::File::create(&p).map_err(|e| Failure::Runtime(ermakov::error::io_error(&p)(e)))?,
                    );
                    scan::write_scan(&mut f, &rows)
                        .and_then(|_| f.flush())
                        .map_err(|e| Failure::Runtime(ermakov::error::io_error(&p)(e)))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    scan::write_scan(&mut lock, &rows).map_err(|e| Failure::Runtime(ermakov::error::io_error(Path::new("-"))(e)))?;
                }
            }
        }
        Command::Verify { suite, report } => {
            let r = verify(suite);
            write_json(report.as_deref(), &r)?;
            for c in &r.failures {
                eprintln!("FAIL {}: {:e} > {:e}", c.name, c.residual, c.gate);
            }
            if !r.passed {
                return Err(Failure::Verification);
            }
        }
        Command::Wigner { source, out, fp_residual, refine } => {
            let cfg = load(&source)?;
            let (files, reports) = wigner::wigner_dump(&cfg, &out, fp_residual, refine)?;
            for p in files {
                eprintln!("{}", p.display());
            }
            write_json(None, &reports)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
