//! Post-pass over checked terms: the subject of every `Flat` and `con`
//! may only mention crisp variables.

use crate::pretty::print_in;
use crate::syntax::Term;

/// Descriptions of every violation in a closed term.
pub fn violations(t: &Term) -> Vec<String> {
    let mut out = Vec::new();
    scan(t, &mut Vec::new(), &mut out);
    out
}

/// `crisp[i]` tells whether the binder at de Bruijn level `i` is crisp.
fn scan(t: &Term, crisp: &mut Vec<bool>, out: &mut Vec<String>) {
    if let Term::Flat(s) | Term::FlatCon(s) = t {
        let n = crisp.len();
        for i in s.free_vars() {
            if i < n && !crisp[n - 1 - i] {
                let names: Vec<String> = (0..n).map(|k| format!("x{k}")).collect();
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                out.push(format!(
                    "`{}` mentions the non-crisp variable `x{}`",
                    print_in(&refs, t),
                    n - 1 - i
                ));
            }
        }
    }
    let flags: Vec<bool> = match t {
        Term::Pi(b, _, _) | Term::Lam(b, _) => vec![b.crisp],
        Term::BoolElim { crisp, .. } => vec![*crisp],
        _ => Vec::new(),
    };
    t.for_each_child(&mut |k, c| {
        let before = crisp.len();
        for j in 0..k {
            let flag = match t {
                // the body of `let con` binds its variable crisp
                Term::FlatElim { body, .. } if std::ptr::eq(c, body.as_ref()) => true,
                _ => flags.get(j).copied().unwrap_or(false),
            };
            crisp.push(flag);
        }
        scan(c, crisp, out);
        crisp.truncate(before);
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Binder, Plicity};
    use std::rc::Rc;

    fn lam(crisp: bool, body: Term) -> Term {
        Term::Lam(
            Binder {
                name: "x".into(),
                plicity: Plicity::Explicit,
                crisp,
            },
            Rc::new(body),
        )
    }

    #[test]
    fn crisp_subject_is_fine() {
        let t = lam(true, Term::FlatCon(Rc::new(Term::Var(0))));
        assert!(violations(&t).is_empty());
    }

    #[test]
    fn non_crisp_subject_is_reported() {
        let t = lam(false, Term::FlatCon(Rc::new(Term::Var(0))));
        assert_eq!(violations(&t).len(), 1);
    }

    #[test]
    fn let_con_binds_crisp() {
        let t = lam(
            false,
            Term::FlatElim {
                motive: Rc::new(Term::Bool),
                scrutinee: Rc::new(Term::Var(0)),
                body: Rc::new(Term::FlatCon(Rc::new(Term::Var(0)))),
            },
        );
        assert!(violations(&t).is_empty());
    }
}
