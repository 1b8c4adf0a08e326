//! Helpers shared by the integration tests.
#![allow(dead_code)]

use cohtt::checker::{CheckOptions, Checker};
use cohtt::corpus::{check_corpus, FILES};
use cohtt::error::Diagnostic;
use cohtt::nbe::{normalize, DEFAULT_BUDGET};
use cohtt::pretty::print_closed;
use cohtt::signature::Signature;

pub fn corpus_sig() -> Signature {
    check_corpus(CheckOptions::default()).expect("corpus checks")
}

/// Elaborate `src` against `sig` and print its normal form.
pub fn nf(sig: &Signature, src: &str) -> String {
    let c = Checker::from_signature(sig.clone(), CheckOptions::default());
    let (t, _) = c
        .elaborate_term("<test>", src)
        .unwrap_or_else(|d| panic!("{src}: {d}"));
    print_closed(&normalize(sig, &t, DEFAULT_BUDGET).expect("within budget"))
}

pub const STRBPT: &str =
    "def strBpt (p : i0 = i1) : Empty\n  := g1snd (transp (\\i. Gph1 i Unit (\\_. Empty)) p tt)\n";

/// Check strict bipointedness on a signature where the graph type no longer
/// computes at `i0`.
///
/// Deleting the `rewrite g1rw0` line from the source breaks `g1pair0` before
/// `strBpt` is reached, so the rule is dropped from the signature instead
/// and `strBpt` is re-checked on its own.
pub fn strbpt_without_g1rw0() -> Result<Vec<String>, Diagnostic> {
    let mut c = Checker::new();
    for f in FILES {
        let src = if f.name == "04-graph.cohtt" {
            assert!(f.source.contains(STRBPT), "strBpt text moved");
            f.source.replace(STRBPT, "")
        } else {
            f.source.to_string()
        };
        c.check_source(f.name, &src)
            .expect("corpus without strBpt checks");
    }
    let sig = c.into_signature().without_rules(&["g1rw0"]);
    // Pad so that reported positions match the file.
    let graph = FILES
        .iter()
        .find(|f| f.name == "04-graph.cohtt")
        .unwrap()
        .source;
    let before = graph[..graph.find(STRBPT).unwrap()].lines().count();
    let src = format!("{}{STRBPT}", "\n".repeat(before));
    Checker::from_signature(sig, CheckOptions::default()).check_source("04-graph.cohtt", &src)
}

/// The corpus with `rewrite natEta` deleted from the source.
pub fn corpus_without_nat_eta() -> Result<(), Diagnostic> {
    let mut c = Checker::new();
    for f in FILES {
        let src = f.source.replace("rewrite natEta\n", "");
        c.check_source(f.name, &src)?;
    }
    Ok(())
}
