//! Command-line front end: list the examples, show their code, run them on
//! integer arguments, and check generated code for free variables.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use stagelet::examples::{lookup, registry, ExampleEntry};
use stagelet::{Error, Limits, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FREE_NAMES: i32 = 2;
pub const EXIT_UNKNOWN_NAME: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Parser)]
#[command(
    name = "stagelet",
    version,
    about = "Show, run, and scope-check the stagelet example generators",
    args_override_self = true
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Forcing rounds allowed per recursive locus
    #[arg(long, global = true, value_name = "N")]
    pub canon_limit: Option<usize>,

    /// Evaluation steps allowed
    #[arg(long, global = true, value_name = "N")]
    pub step_limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List every example with its kind
    List,
    /// Print the code of an example
    Show {
        name: String,
        #[arg(long, value_enum, default_value_t = Format::Pretty)]
        format: Format,
    },
    /// Evaluate an example, applied to integer arguments
    Run {
        name: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<i64>,
    },
    /// Report the free variables of an example's code
    Check { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Sexp,
}

impl CliConfig {
    pub fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            step_limit: self.step_limit.unwrap_or(d.step_limit),
            canon_limit: self.canon_limit.unwrap_or(d.canon_limit),
            ..d
        }
    }
}

/// Exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(text: impl AsRef<str>) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout: line(text.as_ref()),
            stderr: String::new(),
        }
    }

    fn fail(code: i32, text: impl AsRef<str>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: line(text.as_ref()),
        }
    }
}

fn line(text: &str) -> String {
    format!("{}\n", text.trim_end_matches('\n'))
}

/// Parses `argv` (program name first) and executes it.
pub fn run_cli<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match CliConfig::try_parse_from(argv) {
        Ok(config) => execute(&config),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome::fail(EXIT_USAGE, text),
            }
        }
    }
}

pub fn execute(config: &CliConfig) -> Outcome {
    let limits = config.limits();
    match &config.command {
        Command::List => list(),
        Command::Show { name, format } => with_entry(name, |e| {
            let code = e.code(&limits)?;
            Ok(Outcome::ok(match format {
                Format::Pretty => code.pretty(),
                Format::Sexp => code.to_sexp(),
            }))
        }),
        Command::Run { name, args } => with_entry(name, |e| {
            Ok(Outcome::ok(render_value(&e.run_on(args, &limits)?)))
        }),
        Command::Check { name } => with_entry(name, |e| {
            let free = e.code(&limits)?.free_vars();
            if free.is_empty() {
                return Ok(Outcome::ok("closed"));
            }
            let mut names: Vec<String> = free.iter().map(ToString::to_string).collect();
            names.sort();
            Ok(Outcome {
                code: EXIT_FREE_NAMES,
                ..Outcome::ok(format!("free: {}", names.join(" ")))
            })
        }),
    }
}

fn list() -> Outcome {
    let mut entries = registry();
    entries.sort_by_key(|e| e.name);
    let lines: Vec<String> = entries
        .iter()
        .map(|e| format!("{} {}", e.name, e.kind.label()))
        .collect();
    Outcome::ok(lines.join("\n"))
}

fn with_entry(name: &str, f: impl FnOnce(&ExampleEntry) -> Result<Outcome, Error>) -> Outcome {
    let Some(entry) = lookup(name) else {
        return Outcome::fail(
            EXIT_UNKNOWN_NAME,
            format!("error: unknown example `{name}` (see `stagelet list`)"),
        );
    };
    f(&entry).unwrap_or_else(|e| Outcome::fail(EXIT_RUNTIME, format!("error: {e}")))
}

/// Integers in decimal, booleans as `true`/`false`, functions as `<fun>`.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Fun(_) => "<fun>".to_string(),
    }
}
