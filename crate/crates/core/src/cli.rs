//! Command-line front end: axiom checks, the claim catalog and enumeration.
//!
//! Reports are JSON on stdout; `--pretty` prints aligned text instead.
//! Exit codes: 0 pass, 1 failure, 2 usage error, 3 budget exceeded.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::catalog::parse_system;
use crate::claims::{run_claim, ClaimParams, CLAIMS};
use crate::error::{Error, Result};
use crate::oracle::{automorphisms, AutKind, Mode, Options, DEFAULT_BUDGET};
use crate::ring::Ring;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "jordan-aut", version, about = "Automorphism checks for Jordan pairs, triple systems and algebras")]
pub struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Largest number of candidates (or group elements) to accept.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

impl SearchArgs {
    fn options(&self) -> Options {
        Options { budget: self.budget, jobs: self.jobs }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the axioms of a system, e.g. `VIV(n=2,ring=F5)` or a JSON file.
    Verify {
        system: String,
        /// Ring used when the spec names none.
        #[arg(long)]
        ring: Option<String>,
    },
    /// Run a claim from the catalog.
    Check {
        claim: String,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Random samples for sampled claims.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// List the claim catalog.
    Claims,
    /// Compute an automorphism group.
    Enumerate {
        system: String,
        #[arg(long)]
        ring: Option<String>,
        /// `exhaustive` or `generated`.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// `pair`, `triple` or `algebra`; defaults to the structure's own kind.
        #[arg(long)]
        kind: Option<String>,
        /// Write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include every element in the report.
        #[arg(long)]
        dump_elements: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Parse(_)
        | Error::UnknownClaim(_)
        | Error::InvalidRing(_)
        | Error::BadDims(_)
        | Error::BadInput(_)
        | Error::BadElement { .. }
        | Error::NonEnumerableRing(_)
        | Error::RingTooLarge(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn error_json(e: &Error) -> Value {
    json!({ "error": e.kind(), "message": e.to_string() })
}

fn parse_ring(text: &Option<String>) -> Result<Option<Ring>> {
    text.as_deref().map(str::parse).transpose()
}

fn pretty_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn pretty(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = v {
        let width = map.keys().map(String::len).max().unwrap_or(0);
        for (k, val) in map {
            match val {
                Value::Object(inner) => {
                    out.push_str(&format!("{k}\n"));
                    let iw = inner.keys().map(String::len).max().unwrap_or(0);
                    for (ik, iv) in inner {
                        out.push_str(&format!("  {ik:<iw$}  {}\n", pretty_value(iv)));
                    }
                }
                _ => out.push_str(&format!("{k:<width$}  {}\n", pretty_value(val))),
            }
        }
    } else {
        out.push_str(&pretty_value(v));
        out.push('\n');
    }
    out
}

fn emit(out: &mut dyn Write, v: &Value, as_text: bool) {
    let text = if as_text { pretty(v) } else { format!("{v}\n") };
    let _ = out.write_all(text.as_bytes());
}

fn run_command(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Verify { system, ring } => {
            let ring = parse_ring(ring)?;
            let sys = parse_system(system, ring.as_ref())?;
            let report = sys.structure.check_axioms();
            let passed = report.passed();
            let mut v = serde_json::to_value(&report).map_err(|e| Error::BadInput(e.to_string()))?;
            v["system"] = json!(sys.label());
            v["passed"] = json!(passed);
            emit(out, &v, cli.pretty);
            Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Check { claim, ring, m, n, samples, seed, search } => {
            let params = ClaimParams {
                ring: parse_ring(ring)?,
                m: *m,
                n: *n,
                opts: search.options(),
                samples: *samples,
                seed: *seed,
            };
            let report = run_claim(claim, &params)?;
            let v = serde_json::to_value(&report).map_err(|e| Error::BadInput(e.to_string()))?;
            emit(out, &v, cli.pretty);
            Ok(if report.passed { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Claims => {
            let list: Vec<Value> = CLAIMS
                .iter()
                .map(|c| json!({ "id": c.id, "statement": c.statement, "ring": c.ring, "m": c.m, "n": c.n }))
                .collect();
            if cli.pretty {
                let width = CLAIMS.iter().map(|c| c.id.len()).max().unwrap_or(0);
                for c in CLAIMS {
                    let _ = writeln!(out, "{:<width$}  {}", c.id, c.statement);
                }
            } else {
                emit(out, &Value::Array(list), false);
            }
            Ok(EXIT_PASS)
        }
        Command::Enumerate { system, ring, mode, kind, out: path, dump_elements, search } => {
            let ring = parse_ring(ring)?;
            let sys = parse_system(system, ring.as_ref())?;
            let mode: Mode = mode.parse()?;
            let kind = match kind {
                Some(k) => k.parse()?,
                None => AutKind::natural(&sys.structure),
            };
            let set = automorphisms(&sys, kind, mode, &search.options())?;
            let v = set.to_json(*dump_elements);
            match path {
                Some(p) => {
                    let text = serde_json::to_string_pretty(&v).map_err(|e| Error::BadInput(e.to_string()))?;
                    std::fs::write(p, text + "\n").map_err(|e| Error::BadInput(format!("{}: {e}", p.display())))?;
                    let summary = json!({ "system": set.system, "order": set.order(), "out": p.display().to_string() });
                    emit(out, &summary, cli.pretty);
                }
                None => emit(out, &v, cli.pretty),
            }
            Ok(EXIT_PASS)
        }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match run_command(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            emit(out, &error_json(&e), cli.pretty);
            exit_code(&e)
        }
    }
}
