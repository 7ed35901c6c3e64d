use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nhse_core::boundary::CoefficientVariant;
use nhse_core::cli::{self, RunConfig, Selection, Settings};
use nhse_core::nonbloch::Band;
use nhse_core::{Error, ErrorClass};

/// Symmetry and localization diagnostics for the non-Hermitian Kitaev chain.
///
/// Settings come from built-in defaults, then `--config`, then flags.
#[derive(Parser, Debug)]
#[command(name = "nhse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON file with model keys (t, gamma, delta, V, theta, L, boundary) and options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write an SVG figure.
    #[arg(long)]
    svg: bool,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full spectrum with edge/bulk classification.
    Spectrum(Common),
    /// Site densities of selected eigenstates.
    Profiles {
        #[command(flatten)]
        common: Common,
        /// `bulk:k`, `edge:all`, or a comma-separated index list.
        #[arg(long, default_value = "bulk:4")]
        select: String,
    },
    /// Combined-reflection symmetry verdict.
    Symmetry(Common),
    /// Root moduli at sampled bulk energies.
    Gbz(Common),
    /// Non-Bloch Zak phase.
    Zak {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "plus", value_parser = parse_band)]
        band: Band,
    },
    /// Symmetry residual and skin metrics over theta.
    SweepTheta(Common),
    /// Boundary determinant at the exact open-chain eigenvalues.
    Boundary {
        #[command(flatten)]
        common: Common,
        /// `rederived`, `as-printed` or `drop-leading-one`.
        #[arg(long, default_value = "rederived")]
        variant: String,
    },
}

fn parse_band(s: &str) -> Result<Band, String> {
    match s {
        "plus" => Ok(Band::Plus),
        "minus" => Ok(Band::Minus),
        other => Err(format!("expected `plus` or `minus`, got `{other}`")),
    }
}

fn config(c: &Common) -> nhse_core::Result<RunConfig> {
    RunConfig::resolve(c.config.as_deref(), &c.settings, &c.out, c.svg)
}

fn run(command: Command) -> nhse_core::Result<Vec<PathBuf>> {
    match command {
        Command::Spectrum(c) => cli::cmd_spectrum(&config(&c)?),
        Command::Profiles { common, select } => {
            let selection: Selection = select.parse()?;
            cli::cmd_profiles(&config(&common)?, &selection)
        }
        Command::Symmetry(c) => cli::cmd_symmetry(&config(&c)?),
        Command::Gbz(c) => cli::cmd_gbz(&config(&c)?),
        Command::Zak { common, band } => cli::cmd_zak(&config(&common)?, band),
        Command::SweepTheta(c) => cli::cmd_sweep_theta(&config(&c)?),
        Command::Boundary { common, variant } => {
            let variant: CoefficientVariant = variant.parse()?;
            cli::cmd_boundary(&config(&common)?, variant)
        }
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ErrorClass::Config.exit_code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(args.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn exit_for(e: &Error) -> ExitCode {
    ExitCode::from(e.class().exit_code() as u8)
}
