use std::path::PathBuf;
use std::process::{Command, Output};

use cohtt::checker::{CheckOptions, Checker};
use cohtt::cli::term_tree;
use cohtt::corpus::check_corpus;
use cohtt::parser::parse_term;
use cohtt::pretty::print_closed;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(root().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cohtt"))
        .collect();
    files.sort();
    files
}

fn cohtt(args: &[&str]) -> Output {
    cohtt_env(args, None)
}

fn cohtt_env(args: &[&str], budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cohtt"));
    cmd.current_dir(root())
        .args(args)
        .env_remove("COHTT_BUDGET");
    if let Some(b) = budget {
        cmd.env("COHTT_BUDGET", b);
    }
    cmd.output().expect("binary runs")
}

fn with_corpus(before: &[&str], after: &[&str]) -> Output {
    let files: Vec<String> = corpus_files()
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    let mut args: Vec<&str> = before.to_vec();
    args.extend(files.iter().map(String::as_str));
    args.extend(after);
    cohtt(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p.display().to_string()
}

#[test]
fn check_accepts_the_corpus() {
    let o = with_corpus(&["check"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).ends_with("ok: 110 declarations, 21 rewrite rules\n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn normalize_prints_refl() {
    for t in ["shouldBeRefl1", "shouldBeRefl2"] {
        let o = with_corpus(&["normalize"], &["--term", t]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "refl\n");
    }
}

#[test]
fn unknown_term_exits_1() {
    let o = with_corpus(&["normalize"], &["--term", "nosuch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown name `nosuch`"));
}

#[test]
fn modal_violation_exits_1() {
    let o = cohtt(&["check", "corpus/neg/neg-flat-noncrisp.cohtt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[E007]"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_2() {
    let o = cohtt(&["check", "corpus/no-such-file.cohtt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn syntax_error_exits_2() {
    let f = scratch("bad-syntax.cohtt", "def x : := tt\n");
    let o = cohtt(&["check", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[E002]"), "{}", stderr(&o));
}

#[test]
fn budget_exhaustion_reports_the_count() {
    let f = scratch(
        "looping.cohtt",
        "postulate N : Set lzero\npostulate z : N\npostulate s : N -> N\npostulate f : N -> N\n\
         postulate fs (x : N) : f x = f (s x)\nrewrite fs\n",
    );
    let o = cohtt(&["normalize", &f, "--term", "f z", "--budget", "500"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("500 firings"), "{}", stderr(&o));
    let o = cohtt_env(&["normalize", &f, "--term", "f z"], Some("700"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("700 firings"), "{}", stderr(&o));
}

/// Binder names are for display only; the printer may rename them.
fn nameless(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(m) => m
            .into_iter()
            .filter(|(k, _)| k != "name")
            .map(|(k, v)| (k, nameless(v)))
            .collect(),
        other => other,
    }
}

#[test]
fn json_output_round_trips() {
    for t in ["shouldBeRefl1", "strBpt", "plus", "isContr", "PolyId"] {
        let o = with_corpus(&["normalize"], &["--term", t, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["term"], t);
        let nf = v["normal_form"].as_str().unwrap();
        parse_term("<json>", nf).unwrap_or_else(|e| panic!("{t}: {e}"));
        // Check the printed form against the declared type and compare trees.
        let sig = check_corpus(CheckOptions::default()).unwrap();
        let ty = print_closed(&sig.lookup(t).unwrap().ty);
        let mut c = Checker::from_signature(sig, CheckOptions::default());
        c.check_source("<json>", &format!("def again : {ty} := {nf}"))
            .unwrap();
        let body = c.signature().lookup("again").unwrap().body.clone().unwrap();
        assert_eq!(print_closed(&body), nf);
        assert_eq!(
            nameless(term_tree(&mut Vec::new(), &body)),
            nameless(v["tree"].clone()),
            "{t}"
        );
    }
}

#[test]
fn overlaps_are_listed() {
    let o = with_corpus(&["--check-overlaps", "check"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let listed: Vec<&str> = out
        .lines()
        .skip_while(|l| !l.starts_with("overlaps:"))
        .collect();
    assert_eq!(listed[0], "overlaps: 6");
    assert_eq!(listed[4], "zeroBeta \u{22c8} natEta @ recNat");
    assert_eq!(listed.len(), 7);
}

#[test]
fn model_commands() {
    let o = cohtt(&[
        "model",
        "interval",
        "corpus/graphs/walking-edge.g",
        "0",
        "1",
        "--sizes",
        "1,2,3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("pass\n"));

    let o = cohtt(&[
        "model",
        "interval",
        "corpus/graphs/delta2.g",
        "0",
        "1",
        "--sizes",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("non-constant hom [0->0, 1->1]"),
        "{}",
        stdout(&o)
    );

    let o = cohtt(&[
        "model",
        "adjunctions",
        "--max-vertices",
        "4",
        "--max-set",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = cohtt(&["model", "interval", "corpus/graphs/missing.g", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_command_is_deterministic() {
    let a = cohtt(&["corpus", "--check-matches"]);
    let b = cohtt(&["corpus", "--check-matches"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}
