//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (non-invertible input, failed
//! law, out-of-range factor), 2 usage or parse error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::algebra::{centered_product, f_anti_product, f_product};
use crate::capfactor::{validate_factor, CapFactor, DEFAULT_GRID, DEFAULT_TOL_RECIP};
use crate::error::Error;
use crate::events::Event;
use crate::evolution::{exp_map, EvolutionCurve};
use crate::verify::{self, curve_homomorphism, render_table, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Factor used when `--factor` is not given: `f(h) = exp(0.05 h)`.
pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "finlie",
    version,
    about = "Products, evolution curves and law checks for capitalized financial events"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Factor specification (JSON). Defaults to exponential with delta 0.05.
    #[arg(long, global = true)]
    pub factor: Option<PathBuf>,

    /// Output path, or `-` for standard output.
    #[arg(long, global = true)]
    pub out: Option<String>,

    #[arg(long, global = true, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 1e-12)]
    pub atol: f64,

    #[arg(long, global = true, default_value_t = 1e-9)]
    pub rtol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the factor axioms on the default grid.
    Validate,
    /// Multiply two events.
    Product {
        /// Use the anti-product.
        #[arg(long, conflicts_with = "center")]
        anti: bool,
        /// Use the product centered at this event (`t0,h0,c0`).
        #[arg(long, allow_hyphen_values = true)]
        center: Option<Event>,
        #[arg(allow_hyphen_values = true)]
        e: Event,
        #[arg(allow_hyphen_values = true)]
        e2: Event,
    },
    /// Sample the evolution curve of an event as CSV.
    Evolve {
        #[arg(allow_hyphen_values = true)]
        e0: Event,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Run law checks.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        law: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Tangent of the exponential map at (t0, e0), with a homomorphism check.
    Exp {
        #[arg(allow_hyphen_values = true)]
        t0: f64,
        #[arg(allow_hyphen_values = true)]
        e0: Event,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidFactor(_) | Error::UnknownLaw { .. } | Error::EventLiteral(_) => {
                EXIT_USAGE
            }
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn load_factor(opts: &GlobalOpts) -> Result<CapFactor, Failure> {
    match &opts.factor {
        Some(path) => Ok(CapFactor::from_path(path)?),
        None => Ok(CapFactor::exponential(DEFAULT_DELTA)?),
    }
}

fn config(opts: &GlobalOpts) -> VerifyConfig {
    VerifyConfig {
        seed: opts.seed,
        atol: opts.atol,
        rtol: opts.rtol,
        ..VerifyConfig::default()
    }
}

/// Primary output: the `--out` file, or standard output.
fn primary_sink<'a>(
    opts: &GlobalOpts,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, Failure> {
    match opts.out.as_deref() {
        None | Some("-") => Ok(Box::new(stdout)),
        Some(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
    }
}

/// Writes `json` to the `--out` file if one is given; `--out -` sends it to
/// standard output in place of the table.
fn emit_report(
    opts: &GlobalOpts,
    stdout: &mut dyn Write,
    table: &str,
    json: &str,
) -> Result<(), Failure> {
    match opts.out.as_deref() {
        Some("-") => writeln!(stdout, "{json}")?,
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            writeln!(file, "{json}")?;
            file.flush()?;
            write!(stdout, "{table}")?;
        }
        None => write!(stdout, "{table}")?,
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let opts = &cli.global;
    let factor = load_factor(opts)?;
    match &cli.command {
        Command::Validate => {
            let report = validate_factor(&factor, &DEFAULT_GRID, DEFAULT_TOL_RECIP);
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            emit_report(
                opts,
                stdout,
                &render_table(std::slice::from_ref(&report)),
                &json,
            )?;
            Ok(if report.passed { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Product {
            anti,
            center,
            e,
            e2,
        } => {
            let result = match center {
                Some(e0) => centered_product(&factor, e0, e, e2)?,
                None if *anti => f_anti_product(&factor, e, e2)?,
                None => f_product(&factor, e, e2)?,
            };
            let mut sink = primary_sink(opts, stdout)?;
            writeln!(sink, "{result}")?;
            sink.flush()?;
            Ok(EXIT_OK)
        }
        Command::Evolve {
            e0,
            from,
            to,
            steps,
        } => {
            if *steps == 0 {
                return Err(Failure::usage("--steps must be at least 1"));
            }
            if !from.is_finite() || !to.is_finite() || from > to {
                return Err(Failure::usage(format!("invalid time range [{from}, {to}]")));
            }
            let curve = EvolutionCurve::new(*e0, &factor);
            let rows = (0..=*steps)
                .map(|i| {
                    let t = if i == *steps {
                        *to
                    } else {
                        from + (to - from) * i as f64 / *steps as f64
                    };
                    curve.evolve(t)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut sink = primary_sink(opts, stdout)?;
            sink.write_all(b"t,h,c\n")?;
            for p in rows {
                writeln!(sink, "{p}")?;
            }
            sink.flush()?;
            Ok(EXIT_OK)
        }
        Command::Verify { law, all } => {
            let cfg = config(opts);
            let reports = match (law, all) {
                (Some(id), _) => vec![verify::run_law(id, &factor, &cfg)?],
                (None, true) => verify::run_all(&factor, &cfg),
                (None, false) => return Err(Failure::usage("pass --law <id> or --all")),
            };
            let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
            emit_report(opts, stdout, &render_table(&reports), &json)?;
            Ok(if verify::all_passed(&reports) {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
        Command::Exp { t0, e0 } => {
            let (curve, tangent) = exp_map(&factor, *t0, *e0)?;
            let check = curve_homomorphism(&curve, &config(opts));
            let mut sink = primary_sink(opts, stdout)?;
            writeln!(sink, "{}", tangent.direction)?;
            writeln!(
                sink,
                "# homomorphism over {} pairs: max_residual={:e} tolerance={:e} {}",
                check.samples,
                check.max_residual,
                check.tolerance,
                if check.passed { "PASS" } else { "FAIL" }
            )?;
            sink.flush()?;
            Ok(if check.passed { EXIT_OK } else { EXIT_FAIL })
        }
    }
}
