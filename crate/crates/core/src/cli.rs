//! The `hypnorm` command line.
//!
//! Exit codes: 0 success, 2 input or resource error, 3 finite order,
//! 4 degenerate certificate, 5 verification failure.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};

use crate::bound::{self, LocalGeodesicConstants};
use crate::error::Error;
use crate::group::GroupPresentation;
use crate::metric::{WordMetric, DEFAULT_RMAX};
use crate::rational;
use crate::stable_norm;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FINITE_ORDER: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_VERIFY_FAILED: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "hypnorm", version, about = "Word metrics and stable-norm bounds in hyperbolic groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geodesic representative, cyclic reduction and conjugator of a word.
    Reduce {
        #[command(flatten)]
        config: RunArgs,
        word: String,
    },
    /// Two-sided estimate of the stable norm of a word.
    StableNorm {
        #[command(flatten)]
        config: RunArgs,
        word: String,
    },
    /// Uniform lower bound certificate for the group.
    Bound {
        #[command(flatten)]
        config: RunArgs,
    },
    /// Run the invariant suites on the group.
    Verify {
        #[command(flatten)]
        config: RunArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Built-in group (F1, F2, F3, surface2) or presentation file.
    #[arg(short = 'g', long = "group")]
    group: String,
    /// Hyperbolicity constant used to derive (k, lambda, eps).
    #[arg(long, conflicts_with = "constants")]
    delta: Option<String>,
    /// Explicit local-geodesic constants `k,lambda,eps`.
    #[arg(long)]
    constants: Option<String>,
    /// Power horizon.
    #[arg(short = 'N', default_value_t = 10)]
    terms: usize,
    /// Largest ball radius and element length to compute.
    #[arg(long, default_value_t = DEFAULT_RMAX)]
    rmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact machine-readable output.
    #[arg(long)]
    report: bool,
}

/// Resolved configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub presentation: GroupPresentation,
    pub group_name: String,
    pub rmax: usize,
    pub terms: usize,
    pub constants: Option<LocalGeodesicConstants>,
    pub report: bool,
    pub seed: u64,
}

impl RunConfig {
    fn resolve(args: &RunArgs) -> Result<Self, Error> {
        let presentation = GroupPresentation::resolve(&args.group)?;
        let constants = match (&args.delta, &args.constants) {
            (Some(d), None) => Some(LocalGeodesicConstants::from_delta(&rational::parse(d)?)?),
            (None, Some(c)) => Some(LocalGeodesicConstants::parse(c)?),
            (None, None) => None,
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConstants("give --delta or --constants, not both".into()))
            }
        };
        Ok(RunConfig {
            presentation,
            group_name: args.group.clone(),
            rmax: args.rmax,
            terms: args.terms,
            constants,
            report: args.report,
            seed: args.seed,
        })
    }

    pub fn metric(&self) -> Result<WordMetric, Error> {
        WordMetric::with_rmax(self.presentation.clone(), self.rmax)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        CliOutput { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn error(e: &Error) -> Self {
        CliOutput { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FiniteOrder { .. } | Error::Identity => EXIT_FINITE_ORDER,
        Error::Degenerate(_) | Error::CapExceeded { .. } => EXIT_DEGENERATE,
        _ => EXIT_INPUT,
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput::ok(text)
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let (args, word) = match &cli.command {
        Command::Reduce { config, word } | Command::StableNorm { config, word } => {
            (config, Some(word.as_str()))
        }
        Command::Bound { config } | Command::Verify { config } => (config, None),
    };
    let config = match RunConfig::resolve(args) {
        Ok(c) => c,
        Err(e) => return CliOutput::error(&e),
    };
    let result = match &cli.command {
        Command::Reduce { .. } => cmd_reduce(&config, word.unwrap_or_default()),
        Command::StableNorm { .. } => cmd_stable_norm(&config, word.unwrap_or_default()),
        Command::Bound { .. } => cmd_bound(&config),
        Command::Verify { .. } => return cmd_verify(&config),
    };
    match result {
        Ok(out) => CliOutput::ok(out),
        Err(e) => CliOutput::error(&e),
    }
}

pub fn cmd_reduce(config: &RunConfig, word_text: &str) -> Result<String, Error> {
    let metric = config.metric()?;
    let p = metric.presentation();
    let w = p.parse_word(word_text)?;
    let r = stable_norm::cyclically_reduce(&metric, &w)?;
    Ok(format!(
        "geodesic={} cyclic={} conjugator={}\n",
        p.render(&r.geodesic),
        p.render(&r.reduced),
        p.render(&r.conjugator)
    ))
}

pub fn cmd_stable_norm(config: &RunConfig, word_text: &str) -> Result<String, Error> {
    let metric = config.metric()?;
    let w = metric.presentation().parse_word(word_text)?;
    let e = stable_norm::stable_norm_estimate(&metric, &w, config.terms, config.constants.as_ref())?;
    if config.report {
        Ok(format!(
            "lower={} upper={} N={} method={}\n",
            e.lower, e.upper, e.terms_used, e.lower_method
        ))
    } else {
        Ok(format!("{e}\n"))
    }
}

pub fn cmd_bound(config: &RunConfig) -> Result<String, Error> {
    let constants = config.constants.as_ref().ok_or_else(|| {
        Error::InvalidConstants("no constants: pass --delta or --constants".into())
    })?;
    let metric = config.metric()?;
    let cert = bound::compute_certificate(&metric, constants)?;
    Ok(cert.report(metric.presentation().alphabet()))
}

pub fn cmd_verify(config: &RunConfig) -> CliOutput {
    if config.rmax == 0 {
        return CliOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: "error: degenerate scale: R_max must be at least 1\n".into(),
        };
    }
    let metric = match config.metric() {
        Ok(m) => m,
        Err(e) => return CliOutput::error(&e),
    };
    let outcomes = verify::run_suite(&metric, config.constants.as_ref(), config.terms, config.seed);
    let mut out = String::new();
    if config.report {
        let _ = writeln!(
            out,
            "verify group={} strategy={} rmax={} N={} seed={} constants={}",
            config.group_name,
            config.presentation.strategy(),
            config.rmax,
            config.terms,
            config.seed,
            config
                .constants
                .as_ref()
                .map_or_else(|| "none".to_string(), |c| c.to_string().replace(' ', ";"))
        );
    }
    for o in &outcomes {
        let _ = writeln!(out, "{o}");
    }
    let failed = outcomes.iter().filter(|o| o.is_failure()).count();
    if config.report {
        let passed = outcomes.iter().filter(|o| o.is_pass()).count();
        let skipped = outcomes.len() - passed - failed;
        let _ = writeln!(out, "summary pass={passed} fail={failed} skip={skipped}");
    }
    CliOutput {
        code: if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED },
        stdout: out,
        stderr: String::new(),
    }
}
