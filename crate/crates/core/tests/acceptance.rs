//! The acceptance suite: one line per criterion, nonzero exit on failure.

mod common;

use std::time::{Duration, Instant};

use cohtt::checker::{CheckOptions, Checker};
use cohtt::corpus::{check_corpus, corpus_contents, normal_form_of, run_corpus};
use cohtt::error::ErrorCode;
use cohtt::nbe::DEFAULT_BUDGET;
use cohtt::pretty::print_closed;
use cohtt::rewrite::find_overlaps;
use cohtt::rgph::{adjunction_suite, check_interval_axioms, delta, FinRGph};
use common::{corpus_sig, corpus_without_nat_eta, nf, strbpt_without_g1rw0};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, t: Instant, what: &str) -> Result<(), String> {
    ensure(
        t.elapsed() < limit,
        format!("{what} took {:?}", t.elapsed()),
    )
}

fn corpus_acceptance() -> Outcome {
    let t = Instant::now();
    let sig = check_corpus(CheckOptions::default()).map_err(|d| d.to_string())?;
    within(Duration::from_secs(60), t, "checking")?;
    // `rewrite` lines count as declarations, as in the checker's report.
    let decls = sig.declarations().len();
    let rules = sig.rules().len();
    ensure(decls >= 100, format!("only {decls} declarations"))?;
    ensure(rules == 21, format!("{rules} rules"))?;
    Ok(format!(
        "9 files, {decls} declarations ({rules} of them rewrite rules) in {:?}",
        t.elapsed()
    ))
}

fn canonicity() -> Outcome {
    let sig = corpus_sig();
    let mut out = Vec::new();
    for name in ["shouldBeRefl1", "shouldBeRefl2"] {
        let t = Instant::now();
        let got = normal_form_of(&sig, name, DEFAULT_BUDGET)?;
        within(Duration::from_secs(5), t, name)?;
        ensure(got == "refl", format!("{name} normalizes to `{got}`"))?;
        out.push(format!("{name} ~> refl ({:?})", t.elapsed()));
    }
    Ok(out.join(", "))
}

fn bipointedness() -> Outcome {
    let sig = corpus_sig();
    let strbpt = sig.lookup("strBpt").ok_or("strBpt missing")?;
    ensure(
        print_closed(&strbpt.ty) == "i0 = i1 : I -> Empty",
        format!("strBpt has type {}", print_closed(&strbpt.ty)),
    )?;
    let err = match strbpt_without_g1rw0() {
        Ok(_) => return Err("strBpt still checks without g1rw0".into()),
        Err(e) => e,
    };
    ensure(err.code == ErrorCode::TypeMismatch, err.to_string())?;
    ensure(
        err.to_string().starts_with("04-graph.cohtt:32:52:"),
        err.to_string(),
    )?;
    Ok(format!("strBpt checks; without g1rw0: {err}"))
}

fn induction() -> Outcome {
    let sig = corpus_sig();
    for n in ["indNat", "indS1"] {
        ensure(sig.contains(n), format!("{n} missing"))?;
    }
    let got = nf(&sig, "zeroIdR (succ (succ zero))");
    ensure(got == "refl", format!("zeroIdR 2 ~> {got}"))?;
    let err = match corpus_without_nat_eta() {
        Ok(()) => return Err("corpus checks without natEta".into()),
        Err(e) => e,
    };
    ensure(
        err.code == ErrorCode::TypeMismatch
            && err.message.contains("expected type `P n`")
            && err.message.contains("`P (recNat n {lzero} Nat zero succ)`"),
        err.to_string(),
    )?;
    Ok(format!(
        "indNat, indS1 check; zeroIdR 2 ~> refl; without natEta: {err}"
    ))
}

fn modal_discipline() -> Outcome {
    let sig = corpus_sig();
    let mut out = Vec::new();
    for r in corpus_contents().rejections {
        let mut c = Checker::from_signature(sig.clone(), CheckOptions::default());
        match c.check_source(r.file.name, r.file.source) {
            Ok(_) => return Err(format!("{} accepted", r.file.name)),
            Err(d) if d.code == r.code => out.push(format!("{} {}", r.file.name, d.code)),
            Err(d) => return Err(format!("{}: expected {}, got {d}", r.file.name, r.code)),
        }
    }
    Ok(out.join(", "))
}

fn rewrite_soundness() -> Outcome {
    let options = CheckOptions {
        check_matches: true,
        ..CheckOptions::default()
    };
    let report = run_corpus(&options);
    ensure(report.all_passed(), report.render(false))?;
    ensure(
        report.match_violations.is_empty(),
        report.match_violations.join("; "),
    )?;
    let listed: Vec<String> = find_overlaps(&corpus_sig())
        .iter()
        .map(|o| o.to_string())
        .collect();
    let documented = include_str!("../../../corpus/overlaps.txt");
    let documented: Vec<&str> = documented.lines().collect();
    ensure(
        listed == documented,
        format!("overlaps changed: {listed:?}"),
    )?;
    Ok(format!(
        "0 match violations; {} overlaps as documented",
        listed.len()
    ))
}

fn oracle_suite() -> Outcome {
    let t = Instant::now();
    let suite = adjunction_suite(4, 3);
    ensure(suite.passed(), suite.to_string())?;
    within(Duration::from_secs(30), t, "adjunction suite")?;
    let elapsed = t.elapsed();
    let w = check_interval_axioms(&FinRGph::walking_edge(), 0, 1, &[1, 2, 3]);
    ensure(w.passed(), w.to_string())?;
    let d = check_interval_axioms(&delta(2), 0, 1, &[2]);
    let witness = d
        .first_failure()
        .ok_or("delta(2) passed the interval axioms")?;
    ensure(
        witness.detail.contains("non-constant hom"),
        witness.detail.clone(),
    )?;
    Ok(format!(
        "adjunctions up to 4 vertices in {elapsed:?}; walking edge ok; delta(2): {}",
        witness.detail
    ))
}

fn dump() -> Result<String, String> {
    let sig = check_corpus(CheckOptions::default()).map_err(|d| d.to_string())?;
    let mut out = String::new();
    for d in sig.declarations() {
        if d.body.is_some() {
            out.push_str(&format!(
                "{}\t{}\n",
                d.name,
                normal_form_of(&sig, &d.name, DEFAULT_BUDGET)?
            ));
        }
    }
    out.push_str(&run_corpus(&CheckOptions::default()).render(false));
    Ok(out)
}

fn determinism() -> Outcome {
    let a = dump()?;
    let b = dump()?;
    ensure(a == b, "two runs differ")?;
    Ok(format!("two runs byte-identical ({} bytes)", a.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("corpus acceptance", corpus_acceptance),
        ("canonicity witnesses", canonicity),
        ("strict bipointedness", bipointedness),
        ("derived induction", induction),
        ("modal discipline", modal_discipline),
        ("rewrite engine soundness", rewrite_soundness),
        ("oracle suite", oracle_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} [{name}]: PASS - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL - {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
