//! WebAssembly entry points for the demo page in `www/`.
//!
//! Each export takes and returns plain strings so the page needs no glue
//! beyond what `wasm-bindgen` generates.

use wasm_bindgen::prelude::wasm_bindgen;

use cohtt::checker::{CheckOptions, Checker};
use cohtt::corpus::{run_corpus, FILES};
use cohtt::nbe::{normalize, DEFAULT_BUDGET};
use cohtt::pretty::print_closed;
use cohtt::rgph::{check_interval_axioms, FinRGph};

/// Check `source` (on top of the bundled corpus when `with_corpus` is set),
/// then normalize `term`.
#[wasm_bindgen]
pub fn normalize_term(source: &str, term: &str, with_corpus: bool) -> String {
    let mut c = Checker::with_options(CheckOptions::default());
    if with_corpus {
        for f in FILES {
            if let Err(d) = c.check_source(f.name, f.source) {
                return format!("error: {d}");
            }
        }
    }
    if let Err(d) = c.check_source("input", source) {
        return format!("error: {d}");
    }
    let t = match c.elaborate_term("term", term) {
        Ok((t, _)) => t,
        Err(d) => return format!("error: {d}"),
    };
    match normalize(c.signature(), &t, DEFAULT_BUDGET) {
        Ok(nf) => print_closed(&nf),
        Err(e) => format!("error: rewrite budget of {} firings exceeded", e.budget),
    }
}

/// Run the bundled corpus and return its report.
#[wasm_bindgen]
pub fn check_corpus() -> String {
    run_corpus(&CheckOptions::default()).render(false)
}

/// Check the interval axioms for a graph in the `n` / `u v` text format.
/// `sizes` is a comma-separated list of discrete target sizes.
#[wasm_bindgen]
pub fn rgph_oracle(graph: &str, p0: usize, p1: usize, sizes: &str) -> String {
    let g = match FinRGph::parse(graph) {
        Ok(g) => g,
        Err(e) => return format!("error: {e}"),
    };
    let sizes: Result<Vec<usize>, _> = sizes
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    let Ok(sizes) = sizes else {
        return "error: sizes must be a comma-separated list of numbers".to_string();
    };
    let report = check_interval_axioms(&g, p0, p1, &sizes);
    format!(
        "{report}{}\n",
        if report.passed() { "pass" } else { "fail" }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_against_the_corpus() {
        assert_eq!(normalize_term("", "shouldBeRefl1", true), "refl");
        assert_eq!(
            normalize_term("", "plus (succ zero) (succ zero)", true),
            "succ (succ zero)"
        );
    }

    #[test]
    fn normalizes_standalone_source() {
        let src = "def not (b : Bool) : Bool := boolElim (\\_. Bool) false true b\n";
        assert_eq!(normalize_term(src, "not (not true)", false), "true");
        assert!(normalize_term("", "nosuch", false).starts_with("error:"));
    }

    #[test]
    fn corpus_report_passes() {
        let r = check_corpus();
        assert!(!r.contains("FAIL"), "{r}");
        assert!(r.contains("shouldBeRefl2"));
    }

    #[test]
    fn oracle_reports() {
        assert!(rgph_oracle("2\n0 1\n", 0, 1, "1,2,3").ends_with("pass\n"));
        let r = rgph_oracle("2\n", 0, 1, "2");
        assert!(r.contains("non-constant hom [0->0, 1->1]") && r.ends_with("fail\n"));
        assert!(rgph_oracle("x", 0, 1, "2").starts_with("error:"));
    }
}
