//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
//! 3 hard-invariant residual. Cross-check residuals never change the code.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::classifier::classify;
use crate::error::Error;
use crate::examples::{build_section5, example_spec_text, ExampleParams};
use crate::levi_civita::{curvature_bundle, koszul_levi_civita, lee_forms, fundamental_tensor};
use crate::natural::{first_natural_connection, first_natural_potential, torsion};
use crate::pi_manifold::{validate, PiManifoldInstance};
use crate::report::{
    build_report, classification_details, classification_line, connection_table, curvature_text, nonzero_table,
    report_line, to_json,
};
use crate::spec_file::parse_spec;
use crate::tensor::{parse_rational, Rational};
use crate::verify::{run_suites, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pimanifold", version, about = "Exact calculus on left-invariant Riemannian Π-manifolds")]
struct Cli {
    /// Override a declared parameter, `name=p/q`; may be repeated.
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a spec file and print its structure identity residuals.
    Validate { file: PathBuf },
    /// Decide the class of the structure and its special flags.
    Classify { file: PathBuf },
    /// Print the Levi-Civita and first natural connections, torsion and torsion forms.
    Connection { file: PathBuf },
    /// Print curvature, Ricci tensors and scalar curvatures.
    Curvature {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "lc")]
        connection: Which,
    },
    /// Run the identity suites.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Write a machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The five-dimensional Lie group example.
    Example {
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        /// Write the spec file, to stdout when no path is given.
        #[arg(long, num_args = 0..=1, value_name = "PATH")]
        emit: Option<Option<PathBuf>>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Lc,
    Fnc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Core,
    Paper,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Core => Suite::Core,
            SuiteArg::Paper => Suite::Paper,
            SuiteArg::All => Suite::All,
        }
    }
}

/// A failure with its exit code and message.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::LemmaViolation(_) | Error::NaturalityViolation(_) | Error::IdentityViolation(_) => EXIT_INVARIANT,
            _ => EXIT_VALIDATION,
        };
        Failure(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_PARSE, e.to_string())
    }
}

fn parse_overrides(raw: &[String]) -> Result<BTreeMap<String, Rational>, Failure> {
    raw.iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Failure(EXIT_PARSE, format!("--param expects name=value, got `{p}`")))?;
            let v = parse_rational(v.trim())
                .ok_or_else(|| Failure(EXIT_PARSE, format!("--param {k}: invalid rational `{v}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn load(file: &PathBuf, overrides: &BTreeMap<String, Rational>) -> Result<PiManifoldInstance, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", file.display())))?;
    parse_spec(&text, overrides).map_err(|e| {
        let Failure(code, msg) = Failure::from(e);
        Failure(code, format!("{}: {msg}", file.display()))
    })
}

fn rational_arg(name: &str, raw: Option<&str>, fallback: Option<&Rational>, default: Rational) -> Result<Rational, Failure> {
    match raw {
        Some(s) => parse_rational(s).ok_or_else(|| Failure(EXIT_PARSE, format!("--{name}: invalid rational `{s}`"))),
        None => Ok(fallback.cloned().unwrap_or(default)),
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let overrides = parse_overrides(&cli.params)?;
    match cli.command {
        Command::Validate { file } => {
            let inst = load(&file, &overrides)?;
            writeln!(out, "{}: valid (dimension {})", inst.name, inst.dim())?;
            for r in validate(&inst)?.residuals {
                writeln!(out, "  {:<12} 0", r.name)?;
            }
        }
        Command::Classify { file } => {
            let inst = load(&file, &overrides)?;
            let c = classify(&inst)?;
            writeln!(out, "{}", classification_line(&c))?;
            write!(out, "{}", classification_details(&c))?;
        }
        Command::Connection { file } => {
            let inst = load(&file, &overrides)?;
            let lc = koszul_levi_civita(&inst)?;
            let f = fundamental_tensor(&inst, &lc)?;
            let potential = first_natural_potential(&inst, &lc, &f)?;
            let fnc = first_natural_connection(&inst, &lc, &potential)?;
            let t = torsion(&inst, &fnc)?;
            let lee = lee_forms(&inst, &f)?;
            write!(out, "{}", connection_table("nabla", &lc))?;
            write!(out, "{}", connection_table("D1", &fnc))?;
            write!(out, "{}", nonzero_table("T", &t.t3))?;
            write!(out, "{}", nonzero_table("t", &t.t_form))?;
            write!(out, "{}", nonzero_table("t*", &t.t_star))?;
            write!(out, "{}", nonzero_table("t^", &t.t_hat))?;
            write!(out, "{}", nonzero_table("theta", &lee.theta))?;
            write!(out, "{}", nonzero_table("theta*", &lee.theta_star))?;
            write!(out, "{}", nonzero_table("omega", &lee.omega))?;
        }
        Command::Curvature { file, connection } => {
            let inst = load(&file, &overrides)?;
            let lc = koszul_levi_civita(&inst)?;
            let conn = match connection {
                Which::Lc => lc,
                Which::Fnc => {
                    let f = fundamental_tensor(&inst, &lc)?;
                    let potential = first_natural_potential(&inst, &lc, &f)?;
                    first_natural_connection(&inst, &lc, &potential)?
                }
            };
            write!(out, "{}", curvature_text(&curvature_bundle(&inst, &conn)?))?;
        }
        Command::Verify { file, suite, json } => {
            let inst = load(&file, &overrides)?;
            let (analysis, reports) = run_suites(&inst, suite.into())?;
            for r in &reports {
                writeln!(out, "{}", report_line(r))?;
            }
            if let Some(path) = json {
                let text = to_json(&build_report(&inst, &analysis.classification, &reports));
                std::fs::write(&path, text).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?;
            }
            let fatal = reports.iter().filter(|r| r.is_fatal()).count();
            if fatal > 0 {
                writeln!(out, "{fatal} hard invariant(s) with residual")?;
                return Ok(EXIT_INVARIANT);
            }
        }
        Command::Example { lambda, mu, emit } => {
            let lambda = rational_arg("lambda", lambda.as_deref(), overrides.get("lambda"), Rational::from_integer(1.into()))?;
            let mu = rational_arg("mu", mu.as_deref(), overrides.get("mu"), Rational::from_integer(1.into()))?;
            if let Some(k) = overrides.keys().find(|k| *k != "lambda" && *k != "mu") {
                return Err(Failure(EXIT_PARSE, format!("the example has no parameter `{k}`")));
            }
            let params = ExampleParams::new(lambda, mu);
            match emit {
                Some(Some(path)) => std::fs::write(&path, example_spec_text(&params))
                    .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?,
                Some(None) => write!(out, "{}", example_spec_text(&params))?,
                None => {
                    let inst = build_section5(&params);
                    writeln!(out, "{}", classification_line(&classify(&inst)?))?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}
