//! The `cohtt` command line.
//!
//! Exit codes: 0 on success, 1 when a declaration is rejected, a name is
//! unknown, a budget runs out or a model check finds a counterexample, and 2
//! on unreadable files, lexical or syntax errors and bad arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::checker::{CheckOptions, Checker};
use crate::corpus::run_corpus;
use crate::error::Diagnostic;
use crate::nbe::{normalize, DEFAULT_BUDGET};
use crate::pretty::print_closed;
use crate::rewrite::find_overlaps;
use crate::rgph::{adjunction_suite, check_interval_axioms, FinRGph};
use crate::signature::Signature;
use crate::syntax::{Term, Universe};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the default rewrite budget.
pub const BUDGET_VAR: &str = "COHTT_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "cohtt",
    version,
    about = "Check and normalize cohtt developments"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// After checking, list pairs of rewrite rules whose left-hand sides overlap.
    #[arg(long, global = true)]
    pub check_overlaps: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check files in order.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Check files, then print the normal form of a name or closed term.
    Normalize {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// A declared name, or any closed term in surface syntax.
        #[arg(long)]
        term: String,
        /// Print a JSON object with the printed normal form and its term tree.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Run the bundled corpus: every file, the golden normal forms and the
    /// negative tests.
    Corpus {
        /// Show per-entry timings (makes the output nondeterministic).
        #[arg(long)]
        timings: bool,
        /// Verify every rewrite firing against its rule.
        #[arg(long)]
        check_matches: bool,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Check the finite reflexive-graph model.
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Strict bipointedness and weak connectedness of a graph.
    Interval {
        graph: PathBuf,
        p0: usize,
        p1: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        sizes: Vec<usize>,
    },
    /// The adjunctions pi0 -| delta -| gamma -| nabla on all small graphs.
    Adjunctions {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_set: usize,
    },
}

#[derive(Debug, Args)]
pub struct BudgetArg {
    /// Rewrite firings allowed per declaration and per normalization.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
}

impl BudgetArg {
    fn resolve(&self, env: Option<&str>) -> Result<u64, String> {
        if let Some(b) = self.budget {
            return Ok(b);
        }
        match env {
            None => Ok(DEFAULT_BUDGET),
            Some(s) => match s.trim().parse::<u64>() {
                Ok(b) if b > 0 => Ok(b),
                _ => Err(format!(
                    "{BUDGET_VAR} must be a positive integer, got `{s}`"
                )),
            },
        }
    }
}

/// Parse `args` (including the program name) and run. `budget_env` is the
/// value of `COHTT_BUDGET`, if set.
pub fn run(
    args: impl IntoIterator<Item = OsString>,
    budget_env: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    execute(&config, budget_env, out, err)
}

pub fn execute(
    config: &CliConfig,
    budget_env: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let budget = match &config.command {
        Command::Check { budget, .. }
        | Command::Normalize { budget, .. }
        | Command::Corpus { budget, .. } => match budget.resolve(budget_env) {
            Ok(b) => b,
            Err(msg) => {
                let _ = writeln!(err, "error: {msg}");
                return EXIT_USAGE;
            }
        },
        Command::Model(_) => DEFAULT_BUDGET,
    };
    let options = CheckOptions {
        budget,
        ..CheckOptions::default()
    };
    let result = match &config.command {
        Command::Check { files, .. } => cmd_check(files, options, config.check_overlaps, out, err),
        Command::Normalize {
            files, term, json, ..
        } => cmd_normalize(files, term, *json, options, config.check_overlaps, out, err),
        Command::Corpus {
            timings,
            check_matches,
            ..
        } => cmd_corpus(
            *timings,
            *check_matches,
            options,
            config.check_overlaps,
            out,
        ),
        Command::Model(m) => cmd_model(m, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "{message}");
            code
        }
    }
}

/// An error message together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn rejected(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_REJECTED,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Diagnostic> for Failure {
    fn from(d: Diagnostic) -> Failure {
        let code = if d.code.is_syntactic() {
            EXIT_USAGE
        } else {
            EXIT_REJECTED
        };
        Failure {
            code,
            message: d.to_string(),
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Read every file first so that a missing file is reported before any
/// checking happens.
fn check_files(
    files: &[PathBuf],
    options: CheckOptions,
    out: &mut dyn Write,
) -> Result<Checker, Failure> {
    let sources = files
        .iter()
        .map(|p| read(p).map(|s| (p.display().to_string(), s)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut c = Checker::with_options(options);
    for (name, src) in &sources {
        let names = c.check_source(name, src)?;
        let _ = writeln!(out, "{name}: {} declarations", names.len());
    }
    Ok(c)
}

fn print_overlaps(sig: &Signature, out: &mut dyn Write) {
    let overlaps = find_overlaps(sig);
    let _ = writeln!(out, "overlaps: {}", overlaps.len());
    for o in overlaps {
        let _ = writeln!(out, "{o}");
    }
}

pub fn cmd_check(
    files: &[PathBuf],
    options: CheckOptions,
    overlaps: bool,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Result<i32, Failure> {
    let c = check_files(files, options, out)?;
    let sig = c.signature();
    let _ = writeln!(
        out,
        "ok: {} declarations, {} rewrite rules",
        sig.len(),
        sig.rules().len()
    );
    if overlaps {
        print_overlaps(sig, out);
    }
    Ok(EXIT_OK)
}

fn is_identifier(s: &str) -> bool {
    let s = s.trim();
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || "_'".contains(c))
        && !s.starts_with(|c: char| c.is_ascii_digit())
}

pub fn cmd_normalize(
    files: &[PathBuf],
    term: &str,
    json: bool,
    options: CheckOptions,
    overlaps: bool,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Result<i32, Failure> {
    let budget = options.budget;
    // The per-file summary lines are not part of the normalize output.
    let c = check_files(files, options, &mut std::io::sink())?;
    let sig = c.signature();
    if overlaps {
        print_overlaps(sig, out);
    }
    let t = if is_identifier(term) {
        let t = term.trim();
        if !sig.contains(t) {
            return Err(Failure::rejected(format!("error: unknown name `{t}`")));
        }
        Term::constant(t)
    } else {
        c.elaborate_term("<term>", term)?.0
    };
    let nf = normalize(sig, &t, budget).map_err(|e| {
        Failure::rejected(format!(
            "error: rewrite budget of {} firings exceeded",
            e.budget
        ))
    })?;
    let printed = print_closed(&nf);
    if json {
        let v = json!({
            "term": term.trim(),
            "normal_form": printed,
            "tree": term_tree(&mut Vec::new(), &nf),
        });
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&v).expect("JSON values always serialize")
        );
    } else {
        let _ = writeln!(out, "{printed}");
    }
    Ok(EXIT_OK)
}

fn cmd_corpus(
    timings: bool,
    check_matches: bool,
    options: CheckOptions,
    overlaps: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let options = CheckOptions {
        check_matches,
        ..options
    };
    let report = run_corpus(&options);
    let _ = out.write_all(report.render(timings).as_bytes());
    if overlaps {
        if let Ok(sig) = crate::corpus::check_corpus(options) {
            print_overlaps(&sig, out);
        }
    }
    if report.all_passed() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::rejected("corpus: some entries failed"))
    }
}

pub fn cmd_model(cmd: &ModelCommand, out: &mut dyn Write) -> Result<i32, Failure> {
    let report = match cmd {
        ModelCommand::Interval {
            graph,
            p0,
            p1,
            sizes,
        } => {
            let src = read(graph)?;
            let g = FinRGph::parse(&src)
                .map_err(|e| Failure::usage(format!("{}: {e}", graph.display())))?;
            let _ = writeln!(out, "{g}, endpoints {p0} {p1}");
            check_interval_axioms(&g, *p0, *p1, sizes)
        }
        ModelCommand::Adjunctions {
            max_vertices,
            max_set,
        } => {
            if *max_vertices > 4 {
                return Err(Failure::usage("--max-vertices above 4 is not supported"));
            }
            adjunction_suite(*max_vertices, *max_set)
        }
    };
    let _ = write!(out, "{report}");
    if report.passed() {
        let _ = writeln!(out, "pass");
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(out, "fail");
        Ok(EXIT_REJECTED)
    }
}

/// A stable JSON encoding of a core term. Variables carry both their de
/// Bruijn index and the name they had in the source.
pub fn term_tree(scope: &mut Vec<String>, t: &Term) -> Value {
    let under = |scope: &mut Vec<String>, x: &str, body: &Term| {
        scope.push(x.to_string());
        let v = term_tree(scope, body);
        scope.pop();
        v
    };
    match t {
        Term::Var(i) => {
            let n = scope
                .len()
                .checked_sub(i + 1)
                .and_then(|k| scope.get(k))
                .cloned();
            json!({"node": "var", "index": i, "name": n})
        }
        Term::Const(n) => json!({"node": "const", "name": &**n}),
        Term::Meta(m) => json!({"node": "meta", "id": m}),
        Term::Universe(Universe::Set(l)) => json!({"node": "set", "level": term_tree(scope, l)}),
        Term::Universe(Universe::Omega) => json!({"node": "setomega"}),
        Term::LevelType => json!({"node": "level"}),
        Term::LevelZero => json!({"node": "lzero"}),
        Term::LevelSuc(l) => json!({"node": "lsuc", "arg": term_tree(scope, l)}),
        Term::LevelMax(a, b) => {
            json!({"node": "lmax", "left": term_tree(scope, a), "right": term_tree(scope, b)})
        }
        Term::Pi(b, dom, cod) => json!({
            "node": "pi",
            "name": &*b.name,
            "implicit": b.plicity.is_implicit(),
            "crisp": b.crisp,
            "domain": term_tree(scope, dom),
            "codomain": under(scope, &b.name, cod),
        }),
        Term::Lam(b, body) => json!({
            "node": "lam",
            "name": &*b.name,
            "implicit": b.plicity.is_implicit(),
            "crisp": b.crisp,
            "body": under(scope, &b.name, body),
        }),
        Term::App(f, a, p) => json!({
            "node": "app",
            "implicit": p.is_implicit(),
            "fun": term_tree(scope, f),
            "arg": term_tree(scope, a),
        }),
        Term::Sigma(x, a, b) => json!({
            "node": "sigma",
            "name": &***x,
            "first": term_tree(scope, a),
            "second": under(scope, x, b),
        }),
        Term::Pair(a, b) => {
            json!({"node": "pair", "first": term_tree(scope, a), "second": term_tree(scope, b)})
        }
        Term::Fst(p) => json!({"node": "fst", "arg": term_tree(scope, p)}),
        Term::Snd(p) => json!({"node": "snd", "arg": term_tree(scope, p)}),
        Term::IdType(a, x, y) => json!({
            "node": "id",
            "type": term_tree(scope, a),
            "left": term_tree(scope, x),
            "right": term_tree(scope, y),
        }),
        Term::Refl => json!({"node": "refl"}),
        Term::J {
            motive,
            base,
            target,
        } => json!({
            "node": "idelim",
            "motive": term_tree(scope, motive),
            "base": term_tree(scope, base),
            "target": term_tree(scope, target),
        }),
        Term::Unit => json!({"node": "unit"}),
        Term::TT => json!({"node": "tt"}),
        Term::Empty => json!({"node": "empty"}),
        Term::Absurd(a, e) => {
            json!({"node": "absurd", "type": term_tree(scope, a), "arg": term_tree(scope, e)})
        }
        Term::Bool => json!({"node": "bool"}),
        Term::True => json!({"node": "true"}),
        Term::False => json!({"node": "false"}),
        Term::BoolElim {
            motive,
            crisp,
            t_case,
            f_case,
            target,
        } => json!({
            "node": "boolelim",
            "crisp": crisp,
            "motive": term_tree(scope, motive),
            "true": term_tree(scope, t_case),
            "false": term_tree(scope, f_case),
            "target": term_tree(scope, target),
        }),
        Term::Flat(a) => json!({"node": "flat", "arg": term_tree(scope, a)}),
        Term::FlatCon(a) => json!({"node": "con", "arg": term_tree(scope, a)}),
        Term::FlatElim {
            motive,
            scrutinee,
            body,
        } => json!({
            "node": "letcon",
            "motive": term_tree(scope, motive),
            "scrutinee": term_tree(scope, scrutinee),
            "body": under(scope, "y", body),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str], env: Option<&str>) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("cohtt")
            .chain(args.iter().copied())
            .map(OsString::from);
        let code = run(argv, env, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn budget_resolution() {
        let b = BudgetArg { budget: None };
        assert_eq!(b.resolve(None), Ok(DEFAULT_BUDGET));
        assert_eq!(b.resolve(Some("5")), Ok(5));
        assert!(b.resolve(Some("0")).is_err());
        assert_eq!(BudgetArg { budget: Some(7) }.resolve(Some("5")), Ok(7));
    }

    #[test]
    fn zero_budget_flag_is_a_usage_error() {
        let (code, _, _) = run_args(&["check", "x.cohtt", "--budget", "0"], None);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn bad_env_budget_is_a_usage_error() {
        let (code, _, err) = run_args(&["check", "x.cohtt"], Some("lots"));
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains(BUDGET_VAR));
    }

    #[test]
    fn missing_file_exits_2() {
        let (code, _, err) = run_args(&["check", "/nonexistent/file.cohtt"], None);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("/nonexistent/file.cohtt"));
    }

    #[test]
    fn missing_command_exits_2() {
        assert_eq!(run_args(&[], None).0, EXIT_USAGE);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("shouldBeRefl1"));
        assert!(is_identifier("f'"));
        assert!(!is_identifier("succ zero"));
        assert!(!is_identifier("1x"));
    }

    #[test]
    fn tree_names_variables() {
        let t = Term::lam("x", Term::var(0));
        let v = term_tree(&mut Vec::new(), &t);
        assert_eq!(v["body"]["name"], "x");
        assert_eq!(v["body"]["index"], 0);
    }
}
