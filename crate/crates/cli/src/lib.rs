//! Command-line front end: JSON operator files, config resolution and the
//! experiment subcommands.

pub mod commands;
pub mod config;
pub mod format;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use padic_opalg_core::Error;

use crate::config::{ExperimentConfig, Overrides};
use crate::format::SchemeDoc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    /// Unreadable or malformed input, or a bad command line.
    Input(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::NoConvergence { .. } | Error::SearchExhausted { .. } | Error::PrecisionExhausted { .. }) => {
                EXIT_NO_CONVERGENCE
            }
            CliError::Core(Error::Parse(_)) | CliError::Input(_) => EXIT_PARSE,
            CliError::Core(_) => EXIT_PRECONDITION,
        }
    }

    fn report(&self) -> serde_json::Value {
        match self {
            CliError::Core(e) => serde_json::json!({
                "error": commands::error_kind(e),
                "message": e.to_string(),
                "exit_code": self.exit_code(),
            }),
            CliError::Input(msg) => serde_json::json!({
                "error": "input",
                "message": msg,
                "exit_code": self.exit_code(),
            }),
        }
    }
}

fn parse_budget(s: &str) -> Result<(String, u64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let value = value.parse().map_err(|_| format!("bad budget value in {s:?}"))?;
    Ok((name.to_string(), value))
}

#[derive(Parser, Debug)]
#[command(name = "padic-opalg", version, about = "Exact p-adic operator experiments")]
pub struct Cli {
    /// Prime p.
    #[arg(long = "p", global = true)]
    pub prime: Option<u32>,
    /// Relative precision in p-adic digits.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Valuation to which results are checked.
    #[arg(long, global = true)]
    pub target: Option<i64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Iteration budget override, e.g. `lift_powers=32`.
    #[arg(long = "budget", global = true, value_parser = parse_budget)]
    pub budgets: Vec<(String, u64)>,
    /// Config file; overrides the one named by PADIC_OPALG_CONFIG.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Where to write the TSV iteration trace.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mahler expansions.
    Mahler {
        #[command(subcommand)]
        cmd: MahlerCmd,
    },
    /// Functional calculus for normal contractions.
    Calculus {
        #[command(subcommand)]
        cmd: CalculusCmd,
    },
    /// Idempotent refinement, equivalence, splitting and lifting.
    Idem {
        #[command(subcommand)]
        cmd: IdemCmd,
    },
    /// Scale of finite matrices and truncations.
    Scale {
        #[command(subcommand)]
        cmd: ScaleCmd,
    },
    /// Built-in property suite.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum MahlerCmd {
    /// Mahler coefficients of the samples f(0), f(1), ...
    Expand {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        samples: Vec<String>,
    },
    /// Evaluates a Mahler file at x.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CalculusCmd {
    Certify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Use the upper-left K x K block.
        #[arg(long)]
        truncate: Option<usize>,
    },
    Apply {
        #[arg(long = "in")]
        input: PathBuf,
        /// Integer polynomial coefficients, constant term first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        poly: Option<Vec<i64>>,
        #[arg(long)]
        mahler: Option<PathBuf>,
        #[arg(long)]
        truncate: Option<usize>,
    },
    TeichIdem {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        truncate: Option<usize>,
    },
    Fz {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        truncate: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum IdemCmd {
    Refine {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Equiv {
        #[arg(long)]
        e: PathBuf,
        #[arg(long)]
        f: PathBuf,
        /// Treat f as a near-idempotent and refine it first.
        #[arg(long)]
        near: bool,
    },
    Split {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
    },
    Trivialize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "cantor")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 64)]
        prefix: usize,
    },
    Sumring {
        #[arg(long, value_enum, default_value = "cantor")]
        scheme: SchemeArg,
        /// Number of basis vectors checked.
        #[arg(long, default_value_t = 256)]
        range: usize,
        /// Operator whose infinite sum is checked.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ScaleCmd {
    Finite {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
    },
    Probe {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        bounds: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    All,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum SchemeArg {
    Cantor,
    Dyadic,
}

impl From<SchemeArg> for SchemeDoc {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Cantor => SchemeDoc::Cantor,
            SchemeArg::Dyadic => SchemeDoc::Dyadic,
        }
    }
}

fn dispatch(cli: &Cli, env_config: Option<PathBuf>) -> Result<(String, bool), CliError> {
    let overrides = Overrides {
        prime: cli.prime,
        precision: cli.precision,
        target_valuation: cli.target,
        seed: cli.seed,
        budgets: cli.budgets.clone(),
    };
    let config_path = cli.config.clone().or(env_config);
    let cfg = ExperimentConfig::resolve(config_path.as_deref(), &overrides)?;
    let trace = cli.trace.as_ref();
    let out = match &cli.command {
        Command::Mahler { cmd } => match cmd {
            MahlerCmd::Expand { samples } => commands::mahler_expand(&cfg, samples),
            MahlerCmd::Eval { input, x } => commands::mahler_eval(input, x),
        },
        Command::Calculus { cmd } => match cmd {
            CalculusCmd::Certify { input, depth, truncate } => commands::calculus_certify(&cfg, input, *depth, *truncate),
            CalculusCmd::Apply { input, poly, mahler, truncate } => {
                commands::calculus_apply(&cfg, input, poly.as_deref(), mahler.as_deref(), *truncate)
            }
            CalculusCmd::TeichIdem { input, truncate } => commands::calculus_teich_idem(&cfg, input, *truncate, trace),
            CalculusCmd::Fz { input, z, depth, truncate } => commands::calculus_fz(&cfg, input, z, *depth, *truncate),
        },
        Command::Idem { cmd } => match cmd {
            IdemCmd::Refine { input } => commands::idem_refine(&cfg, input, trace),
            IdemCmd::Equiv { e, f, near } => commands::idem_equiv(&cfg, e, f, *near),
            IdemCmd::Split { input } => commands::idem_split(&cfg, input),
            IdemCmd::Lift { input } => commands::idem_lift(&cfg, input, trace),
            IdemCmd::Trivialize { input, scheme, depth, prefix } => {
                commands::idem_trivialize(&cfg, input, &(*scheme).into(), *depth, *prefix)
            }
            IdemCmd::Sumring { scheme, range, input, depth } => {
                commands::idem_sumring(&cfg, &(*scheme).into(), *range, input.as_deref(), *depth)
            }
        },
        Command::Scale { cmd } => match cmd {
            ScaleCmd::Finite { input, dim } => commands::scale_finite(input, *dim),
            ScaleCmd::Probe { input, bounds } => commands::scale_probe(input, bounds),
        },
        Command::Verify { cmd: VerifyCmd::All } => return commands::verify_all(&cfg),
    };
    out.map(|s| (s, true))
}

/// Runs one invocation and returns the process exit status.
pub fn run<I, T>(args: I, env_config: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, env_config) {
        Ok((text, ok)) => {
            let _ = write!(out, "{text}");
            if ok {
                EXIT_OK
            } else {
                EXIT_PRECONDITION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.report());
            e.exit_code()
        }
    }
}
