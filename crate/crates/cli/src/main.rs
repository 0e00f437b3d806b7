//! `dmimp`: simulate, calibrate, extract, compare and convert.
//!
//! Exit codes: 0 success, 1 I/O error, 2 usage or validation error,
//! 3 deviation detected (only with `compare --fail-on-deviation`).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dmimp_core::benchsim::EditSet;
use dmimp_core::calib::{DEFAULT_CONDITIONING_FLOOR, DEFAULT_R_LOAD};
use dmimp_core::compare::DEFAULT_THRESHOLD_DB;
use dmimp_core::io::DataFormat;

use commands::OutFormat;

#[derive(Parser)]
#[command(
    name = "dmimp",
    version,
    about = "Single-probe in-circuit DM impedance extraction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize Touchstone files from a bench description.
    Simulate {
        /// Bench TOML file; also looked up in $DMIMP_CONFIG_DIR.
        bench: PathBuf,
        out_dir: PathBuf,
        /// Also write open.s1p, short.s1p and load.s1p.
        #[arg(long)]
        standards: bool,
        /// DUT variant as label=scale[,label=scale...]; repeatable.
        #[arg(long = "dut-variant", value_parser = parse_variant)]
        dut_variant: Vec<Variant>,
        /// Override the noise seed from the bench file.
        #[arg(long)]
        seed: Option<u64>,
        /// Ignore unknown keys in the bench file.
        #[arg(long)]
        lenient: bool,
    },
    /// Solve calibration coefficients from open/short/load Touchstone files.
    Calibrate {
        #[arg(long)]
        open: PathBuf,
        #[arg(long)]
        short: PathBuf,
        #[arg(long)]
        load: PathBuf,
        /// Resistance of the load standard in ohms.
        #[arg(long, default_value_t = DEFAULT_R_LOAD)]
        r_load: f64,
        /// Minimum |Γ_L − Γ_s| for a point to count as well conditioned.
        #[arg(long, default_value_t = DEFAULT_CONDITIONING_FLOOR)]
        conditioning_floor: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a measured reflection trace to impedance CSV.
    Extract {
        #[arg(long)]
        cal: PathBuf,
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Interpolate the measurement onto the calibration grid.
        #[arg(long)]
        resample: bool,
    },
    /// Compare two impedance CSV files and report deviation bands.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_DB)]
        threshold_db: f64,
        /// Per-point report; bands go to <stem>_bands.<ext> alongside.
        #[arg(long)]
        out: PathBuf,
        /// Exit with status 3 when any band is found.
        #[arg(long)]
        fail_on_deviation: bool,
    },
    /// Convert between Touchstone formats and trace CSV.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
}

#[derive(Clone)]
struct Variant(EditSet);

fn parse_variant(s: &str) -> Result<Variant, String> {
    commands::parse_edit_set(s).map(Variant)
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ri,
    Ma,
    Db,
    Csv,
}

impl From<Format> for OutFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Ri => OutFormat::Touchstone(DataFormat::Ri),
            Format::Ma => OutFormat::Touchstone(DataFormat::Ma),
            Format::Db => OutFormat::Touchstone(DataFormat::Db),
            Format::Csv => OutFormat::Csv,
        }
    }
}

fn run(cli: Cli) -> Result<(), output::Failure> {
    match cli.command {
        Command::Simulate {
            bench,
            out_dir,
            standards,
            dut_variant,
            seed,
            lenient,
        } => commands::simulate(&commands::SimulateArgs {
            bench,
            out_dir,
            standards,
            variants: dut_variant.into_iter().map(|v| v.0).collect(),
            seed,
            lenient,
        }),
        Command::Calibrate {
            open,
            short,
            load,
            r_load,
            conditioning_floor,
            out,
        } => commands::calibrate(&commands::CalibrateArgs {
            open,
            short,
            load,
            r_load,
            conditioning_floor,
            out,
        }),
        Command::Extract {
            cal,
            meas,
            out,
            resample,
        } => commands::extract(&commands::ExtractArgs {
            cal,
            meas,
            out,
            resample,
        }),
        Command::Compare {
            a,
            b,
            threshold_db,
            out,
            fail_on_deviation,
        } => commands::compare_cmd(&commands::CompareArgs {
            a,
            b,
            threshold_db,
            out,
            fail_on_deviation,
        }),
        Command::Convert {
            input,
            output,
            format,
        } => commands::convert(&input, &output, format.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
