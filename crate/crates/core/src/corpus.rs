//! The bundled development: nine ordered source files that check from the
//! empty signature, a golden list of normal forms, and negative tests.
//!
//! Sources are compiled into the binary so the corpus can be run without a
//! checkout. Each negative test names its expected code on its first line
//! as `-- expect: E###` and is checked on top of the full corpus.

use std::fmt;
use std::time::Duration;

use crate::checker::{CheckOptions, Checker};
use crate::error::{Diagnostic, ErrorCode};
use crate::nbe::normalize;
use crate::pretty::print_closed;
use crate::signature::Signature;
use crate::syntax::{name, Term};

#[derive(Clone, Copy, Debug)]
pub struct CorpusFile {
    pub name: &'static str,
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Golden {
    pub term: String,
    pub normal_form: String,
}

#[derive(Clone, Debug)]
pub struct Rejection {
    pub file: CorpusFile,
    pub code: ErrorCode,
}

#[derive(Clone, Debug)]
pub struct CorpusManifest {
    pub files: Vec<CorpusFile>,
    pub golden: Vec<Golden>,
    pub rejections: Vec<Rejection>,
}

macro_rules! corpus_file {
    ($name:literal) => {
        CorpusFile {
            name: $name,
            source: include_str!(concat!("../../../corpus/", $name)),
        }
    };
}

pub const FILES: [CorpusFile; 9] = [
    corpus_file!("00-prelude.cohtt"),
    corpus_file!("01-flat.cohtt"),
    corpus_file!("02-interval.cohtt"),
    corpus_file!("03-path.cohtt"),
    corpus_file!("04-graph.cohtt"),
    corpus_file!("05-polyid.cohtt"),
    corpus_file!("06-bool.cohtt"),
    corpus_file!("07-nat.cohtt"),
    corpus_file!("08-circle.cohtt"),
];

pub const NEGATIVE: [CorpusFile; 3] = [
    corpus_file!("neg/neg-flat-noncrisp.cohtt"),
    corpus_file!("neg/g1snd-at-i0.cohtt"),
    corpus_file!("neg/noncrisp-in-con.cohtt"),
];

const GOLDEN: &str = include_str!("../../../corpus/golden.txt");

/// `name<TAB>normal form` lines; `#` starts a comment line.
pub fn parse_golden(src: &str) -> Vec<Golden> {
    src.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('\t'))
        .map(|(t, nf)| Golden {
            term: t.trim().to_string(),
            normal_form: nf.trim().to_string(),
        })
        .collect()
}

/// The code a negative test declares on its first line.
pub fn expected_code(src: &str) -> Option<ErrorCode> {
    let first = src.lines().next()?;
    ErrorCode::from_code(first.strip_prefix("-- expect:")?.trim())
}

pub fn corpus_contents() -> CorpusManifest {
    CorpusManifest {
        files: FILES.to_vec(),
        golden: parse_golden(GOLDEN),
        rejections: NEGATIVE
            .iter()
            .map(|f| Rejection {
                file: *f,
                code: expected_code(f.source).expect("negative test without an `-- expect:` line"),
            })
            .collect(),
    }
}

/// Check the nine files in order from the empty signature.
pub fn check_corpus(options: CheckOptions) -> Result<Signature, Diagnostic> {
    let mut c = Checker::with_options(options);
    for f in FILES {
        c.check_source(f.name, f.source)?;
    }
    Ok(c.into_signature())
}

/// Normal form of a declared name, printed.
pub fn normal_form_of(sig: &Signature, term: &str, budget: u64) -> Result<String, String> {
    if sig.lookup(term).is_none() {
        return Err(format!("unknown name `{term}`"));
    }
    normalize(sig, &Term::Const(name(term)), budget)
        .map(|t| print_closed(&t))
        .map_err(|e| format!("rewrite budget of {} firings exceeded", e.budget))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    File,
    Golden,
    Rejection,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::File => "check",
            EntryKind::Golden => "golden",
            EntryKind::Rejection => "reject",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub kind: EntryKind,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusReport {
    pub entries: Vec<Entry>,
    /// Rule firings that did not match their left-hand side.
    pub match_violations: Vec<String>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed) && self.match_violations.is_empty()
    }

    /// One line per entry. Timings are left out unless asked for, so that
    /// two runs render identically.
    pub fn render(&self, timings: bool) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let status = if e.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("{status} {:<6} {}", e.kind, e.name));
            if !e.detail.is_empty() {
                out.push_str(&format!(": {}", e.detail));
            }
            if timings {
                out.push_str(&format!(" ({:.1} ms)", e.elapsed.as_secs_f64() * 1e3));
            }
            out.push('\n');
        }
        for v in &self.match_violations {
            out.push_str(&format!("FAIL match   {v}\n"));
        }
        out
    }
}

/// Wall-clock timing where the platform has a clock; browsers running the
/// corpus as WebAssembly get zero durations instead of a panic.
struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Stopwatch {
    fn start() -> Stopwatch {
        Stopwatch(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn elapsed(&self) -> Duration {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed();
        #[cfg(target_arch = "wasm32")]
        return Duration::ZERO;
    }
}

/// Check every file, evaluate the golden list and run the negative tests.
pub fn run_corpus(options: &CheckOptions) -> CorpusReport {
    let manifest = corpus_contents();
    let mut report = CorpusReport::default();
    let mut c = Checker::with_options(options.clone());
    let mut all_checked = true;
    for f in &manifest.files {
        let t = Stopwatch::start();
        let r = c.check_source(f.name, f.source);
        let (passed, detail) = match &r {
            Ok(names) => (true, format!("{} declarations", names.len())),
            Err(d) => (false, d.to_string()),
        };
        all_checked &= passed;
        report.entries.push(Entry {
            kind: EntryKind::File,
            name: f.name.to_string(),
            passed,
            detail,
            elapsed: t.elapsed(),
        });
        if !passed {
            break;
        }
    }
    report.match_violations = c.match_violations().to_vec();
    let sig = c.into_signature();

    for g in &manifest.golden {
        let t = Stopwatch::start();
        let (passed, detail) = if !all_checked {
            (false, "corpus did not check".to_string())
        } else {
            match normal_form_of(&sig, &g.term, options.budget) {
                Ok(nf) if nf == g.normal_form => (true, nf),
                Ok(nf) => (false, format!("expected `{}`, got `{nf}`", g.normal_form)),
                Err(e) => (false, e),
            }
        };
        report.entries.push(Entry {
            kind: EntryKind::Golden,
            name: g.term.clone(),
            passed,
            detail,
            elapsed: t.elapsed(),
        });
    }

    for r in &manifest.rejections {
        let t = Stopwatch::start();
        let mut c = Checker::from_signature(sig.clone(), options.clone());
        let (passed, detail) = match c.check_source(r.file.name, r.file.source) {
            Ok(_) => (false, format!("accepted, expected {}", r.code)),
            Err(d) if d.code == r.code => (true, d.code.to_string()),
            Err(d) => (false, format!("expected {}, got {d}", r.code)),
        };
        report.entries.push(Entry {
            kind: EntryKind::Rejection,
            name: r.file.name.to_string(),
            passed,
            detail,
            elapsed: t.elapsed(),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_lines_parse() {
        let g = parse_golden("# comment\na\trefl\n\nb\t\\x. x\n");
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].normal_form, "\\x. x");
    }

    #[test]
    fn expect_header() {
        assert_eq!(
            expected_code("-- expect: E007\ndef"),
            Some(ErrorCode::Modal)
        );
        assert_eq!(expected_code("def x : Unit := tt"), None);
    }

    #[test]
    fn manifest_is_complete() {
        let m = corpus_contents();
        assert_eq!(m.files.len(), 9);
        assert_eq!(m.rejections.len(), 3);
        assert!(m
            .golden
            .iter()
            .any(|g| g.term == "shouldBeRefl1" && g.normal_form == "refl"));
        assert!(m
            .golden
            .iter()
            .any(|g| g.term == "shouldBeRefl2" && g.normal_form == "refl"));
    }
}
