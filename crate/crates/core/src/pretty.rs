//! Printing core terms as surface syntax.
//!
//! Core terms are turned back into a surface tree, with bound variables
//! renamed where needed so the text re-parses to the same term, and then
//! handed to the surface printer.

use crate::parser::ast::{Arg, Group, LamBinder, SKind, STerm};
use crate::parser::lexer::Tok;
use crate::parser::{print_term, Span};
use crate::syntax::{Plicity, Term, Universe};

fn mk(kind: SKind) -> STerm {
    STerm::new(Span::synthetic(), kind)
}

struct Delab {
    scope: Vec<String>,
}

impl Delab {
    /// Pick a printable name for a binder whose body is `body`.
    fn fresh(&self, hint: &str, body: &Term, used: bool) -> String {
        if !used {
            return "_".to_string();
        }
        let base = if hint.is_empty() || hint == "_" {
            "x"
        } else {
            hint
        };
        let clash = |n: &str| {
            self.scope.iter().any(|s| s == n) || body.mentions_const(n) || Tok::is_keyword_name(n)
        };
        if !clash(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| !clash(n))
            .unwrap()
    }

    fn under<T>(&mut self, name: String, f: impl FnOnce(&mut Delab) -> T) -> T {
        self.scope.push(name);
        let r = f(self);
        self.scope.pop();
        r
    }

    fn binder_lam(
        &mut self,
        hint: &str,
        body: &Term,
        implicit: bool,
        crisp: bool,
    ) -> (LamBinder, STerm) {
        let name = self.fresh(hint, body, body.has_free_var(0));
        let b = LamBinder {
            name: name.clone(),
            implicit,
            crisp,
        };
        let t = self.under(name, |d| d.term(body));
        (b, t)
    }

    fn term(&mut self, t: &Term) -> STerm {
        match t {
            Term::Var(i) => {
                let n = self.scope.len();
                let name = if *i < n {
                    self.scope[n - 1 - i].clone()
                } else {
                    format!("free{}", i - n)
                };
                mk(SKind::Var(name))
            }
            Term::Const(c) => mk(SKind::Var(c.to_string())),
            Term::Meta(_) => mk(SKind::Hole),
            Term::Universe(Universe::Set(l)) => mk(SKind::Set(self.term(l))),
            Term::Universe(Universe::Omega) => mk(SKind::SetOmega),
            Term::LevelType => mk(SKind::Level),
            Term::LevelZero => mk(SKind::LZero),
            Term::LevelSuc(l) => mk(SKind::LSuc(self.term(l))),
            Term::LevelMax(a, b) => mk(SKind::Lub(self.term(a), self.term(b))),
            Term::Pi(b, a, c) => {
                let dom = self.term(a);
                if !c.has_free_var(0) && b.plicity == Plicity::Explicit && !b.crisp {
                    let cod = self.under("_".to_string(), |d| d.term(c));
                    return mk(SKind::Arrow(dom, cod));
                }
                let name = self.fresh(&b.name, c, true);
                let cod = self.under(name.clone(), |d| d.term(c));
                mk(SKind::Pi(
                    vec![Group {
                        names: vec![name],
                        ty: dom,
                        implicit: b.plicity.is_implicit(),
                        crisp: b.crisp,
                    }],
                    cod,
                ))
            }
            Term::Lam(..) => {
                let mut binders = Vec::new();
                let mut cur = t;
                let depth = self.scope.len();
                while let Term::Lam(b, body) = cur {
                    let name = self.fresh(&b.name, body, body.has_free_var(0));
                    binders.push(LamBinder {
                        name: name.clone(),
                        implicit: b.plicity.is_implicit(),
                        crisp: b.crisp,
                    });
                    self.scope.push(name);
                    cur = body;
                }
                let body = self.term(cur);
                self.scope.truncate(depth);
                mk(SKind::Lam(binders, body))
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                let mut out = self.term(head);
                for (a, p) in args {
                    let a = self.term(a);
                    let arg = match p {
                        Plicity::Explicit => Arg::Explicit(a),
                        Plicity::Implicit => Arg::Implicit(a),
                    };
                    out = mk(SKind::App(out, arg));
                }
                out
            }
            Term::Sigma(x, a, b) => {
                let dom = self.term(a);
                if !b.has_free_var(0) {
                    let cod = self.under("_".to_string(), |d| d.term(b));
                    return mk(SKind::Prod(dom, cod));
                }
                let name = self.fresh(x, b, true);
                let cod = self.under(name.clone(), |d| d.term(b));
                mk(SKind::Sigma(name, dom, cod))
            }
            Term::Pair(a, b) => mk(SKind::Pair(self.term(a), self.term(b))),
            Term::Fst(p) => mk(SKind::Fst(self.term(p))),
            Term::Snd(p) => mk(SKind::Snd(self.term(p))),
            Term::IdType(a, x, y) => mk(SKind::Eq(self.term(x), self.term(y), Some(self.term(a)))),
            Term::Refl => mk(SKind::Refl),
            Term::J {
                motive,
                base,
                target,
            } => {
                let depth = self.scope.len();
                let inner: &Term = motive;
                let y = self.fresh("y", inner, inner.has_free_var(1));
                self.scope.push(y.clone());
                let p = self.fresh("p", inner, inner.has_free_var(0));
                self.scope.push(p.clone());
                let m = self.term(inner);
                self.scope.truncate(depth);
                let binders = [y, p]
                    .into_iter()
                    .map(|name| LamBinder {
                        name,
                        implicit: false,
                        crisp: false,
                    })
                    .collect();
                mk(SKind::IdElim(
                    mk(SKind::Lam(binders, m)),
                    self.term(base),
                    self.term(target),
                ))
            }
            Term::Unit => mk(SKind::Unit),
            Term::TT => mk(SKind::TT),
            Term::Empty => mk(SKind::Empty),
            Term::Absurd(m, e) => mk(SKind::Absurd(self.term(m), self.term(e))),
            Term::Bool => mk(SKind::Bool),
            Term::True => mk(SKind::True),
            Term::False => mk(SKind::False),
            Term::BoolElim {
                motive,
                crisp,
                t_case,
                f_case,
                target,
            } => {
                let (b, m) = self.binder_lam("b", motive, false, *crisp);
                mk(SKind::BoolElim(
                    mk(SKind::Lam(vec![b], m)),
                    self.term(t_case),
                    self.term(f_case),
                    self.term(target),
                ))
            }
            Term::Flat(a) => mk(SKind::Flat(self.term(a))),
            Term::FlatCon(a) => mk(SKind::Con(self.term(a))),
            Term::FlatElim {
                motive,
                scrutinee,
                body,
            } => {
                let (zb, m) = self.binder_lam("z", motive, false, false);
                let y = self.fresh("y", body, body.has_free_var(0));
                let b = self.under(y.clone(), |d| d.term(body));
                mk(SKind::LetCon {
                    name: y,
                    scrutinee: self.term(scrutinee),
                    motive: Some(mk(SKind::Lam(vec![zb], m))),
                    body: b,
                })
            }
        }
    }
}

/// Surface tree for a term whose free variables are named by `scope`
/// (outermost first).
pub fn delaborate(scope: &[&str], t: &Term) -> STerm {
    let mut d = Delab {
        scope: scope.iter().map(|s| s.to_string()).collect(),
    };
    d.term(t)
}

pub fn print_in(scope: &[&str], t: &Term) -> String {
    print_term(&delaborate(scope, t))
}

pub fn print_closed(t: &Term) -> String {
    print_in(&[], t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Binder, Plicity};
    use std::rc::Rc;

    #[test]
    fn arrows_and_shadowing() {
        // (A : Set lzero) -> A -> A
        let t = Term::pi("A", Term::set0(), Term::pi("a", Term::Var(0), Term::Var(1)));
        assert_eq!(print_closed(&t), "(A : Set lzero) -> A -> A");
        // \x. \x. x (outer)
        let t = Term::lam("x", Term::lam("x", Term::Var(1)));
        assert_eq!(print_closed(&t), "\\x _. x");
        let t = Term::lam(
            "x",
            Term::lam(
                "x",
                Term::App(
                    Rc::new(Term::Var(1)),
                    Rc::new(Term::Var(0)),
                    Plicity::Explicit,
                ),
            ),
        );
        assert_eq!(print_closed(&t), "\\x x1. x x1");
    }

    #[test]
    fn binder_avoids_constant_names() {
        // \i. i0 i  with a bound variable hinted `i0`
        let t = Term::Lam(
            Binder::explicit("i0"),
            Rc::new(Term::App(
                Rc::new(Term::constant("i0")),
                Rc::new(Term::Var(0)),
                Plicity::Explicit,
            )),
        );
        assert_eq!(print_closed(&t), "\\i01. i0 i01");
    }

    #[test]
    fn implicit_application() {
        let t = Term::app_implicit(Term::constant("f"), Term::Bool);
        assert_eq!(print_closed(&t), "f {Bool}");
    }
}
