use std::rc::Rc;

use crate::level::{Level, LevelAtom};
use crate::nbe::eval::Evaluator;
use crate::nbe::value::{Closure, Elim, Head, Sort, Val, Value};
use crate::syntax::{Term, Universe};

fn index_of(depth: usize, level: usize) -> usize {
    assert!(
        level < depth,
        "variable level {level} escapes depth {depth}"
    );
    depth - 1 - level
}

/// Level normal form back to a term: `lsuc^k` applied to each atom, joined
/// with `\/`, constant last.
pub fn quote_level(depth: usize, l: &Level) -> Term {
    let mut parts: Vec<Term> = Vec::new();
    for (a, k) in l.atoms() {
        let mut t = match a {
            LevelAtom::Var(v) => Term::Var(index_of(depth, v)),
            LevelAtom::Meta(m) => Term::Meta(m),
        };
        for _ in 0..k {
            t = Term::LevelSuc(Rc::new(t));
        }
        parts.push(t);
    }
    let c = l.constant_part();
    if c > 0 || parts.is_empty() {
        let mut t = Term::LevelZero;
        for _ in 0..c {
            t = Term::LevelSuc(Rc::new(t));
        }
        parts.push(t);
    }
    let mut it = parts.into_iter();
    let first = it.next().unwrap();
    it.fold(first, |acc, t| Term::LevelMax(Rc::new(acc), Rc::new(t)))
}

impl Evaluator<'_> {
    fn quote_closure(&self, depth: usize, cl: &Closure, dom: Option<&Val>) -> Term {
        let x = match dom {
            Some(d) => Value::fresh_for(&self.force(d), depth),
            None => Value::var(depth),
        };
        self.quote(depth + 1, &self.inst(cl, x))
    }

    fn quote_closure2(&self, depth: usize, cl: &Closure) -> Term {
        let v = self.inst2(cl, Value::var(depth), Value::var(depth + 1));
        self.quote(depth + 2, &v)
    }

    /// Read a value back to a beta-normal term at context depth `depth`.
    pub fn quote(&self, depth: usize, v: &Val) -> Term {
        let v = self.force(v);
        match &*v {
            Value::Universe(Sort::Set(l)) => {
                Term::Universe(Universe::Set(Rc::new(quote_level(depth, l))))
            }
            Value::Universe(Sort::Omega) => Term::Universe(Universe::Omega),
            Value::LevelType => Term::LevelType,
            Value::Level(l) => quote_level(depth, l),
            Value::Pi(b, a, cl) => Term::Pi(
                b.clone(),
                Rc::new(self.quote(depth, a)),
                Rc::new(self.quote_closure(depth, cl, Some(a))),
            ),
            Value::Lam(b, cl) => Term::Lam(b.clone(), Rc::new(self.quote_closure(depth, cl, None))),
            Value::Sigma(x, a, cl) => Term::Sigma(
                crate::syntax::Hint(x.clone()),
                Rc::new(self.quote(depth, a)),
                Rc::new(self.quote_closure(depth, cl, Some(a))),
            ),
            Value::Pair(a, b) => {
                Term::Pair(Rc::new(self.quote(depth, a)), Rc::new(self.quote(depth, b)))
            }
            Value::IdType(a, x, y) => Term::IdType(
                Rc::new(self.quote(depth, a)),
                Rc::new(self.quote(depth, x)),
                Rc::new(self.quote(depth, y)),
            ),
            Value::Refl => Term::Refl,
            Value::Unit => Term::Unit,
            Value::TT => Term::TT,
            Value::Empty => Term::Empty,
            Value::Bool => Term::Bool,
            Value::True => Term::True,
            Value::False => Term::False,
            Value::Flat(a) => Term::Flat(Rc::new(self.quote(depth, a))),
            Value::FlatCon(a) => Term::FlatCon(Rc::new(self.quote(depth, a))),
            Value::Neutral(h, sp) => {
                let mut t = match h {
                    Head::Var(l) => Term::Var(index_of(depth, *l)),
                    Head::Const(c) => Term::Const(c.clone()),
                    Head::Meta(m) => Term::Meta(*m),
                };
                for e in sp.iter() {
                    t = self.quote_elim(depth, t, e);
                }
                t
            }
        }
    }

    fn quote_elim(&self, depth: usize, t: Term, e: &Elim) -> Term {
        let t = Rc::new(t);
        match e {
            Elim::App(a, p) => Term::App(t, Rc::new(self.quote(depth, a)), *p),
            Elim::Fst => Term::Fst(t),
            Elim::Snd => Term::Snd(t),
            Elim::J { motive, base } => Term::J {
                motive: Rc::new(self.quote_closure2(depth, motive)),
                base: Rc::new(self.quote(depth, base)),
                target: t,
            },
            Elim::BoolElim {
                motive,
                crisp,
                t_case,
                f_case,
            } => Term::BoolElim {
                motive: Rc::new(self.quote_closure(depth, motive, Some(&Rc::new(Value::Bool)))),
                crisp: *crisp,
                t_case: Rc::new(self.quote(depth, t_case)),
                f_case: Rc::new(self.quote(depth, f_case)),
                target: t,
            },
            Elim::FlatElim { motive, body } => Term::FlatElim {
                motive: Rc::new(self.quote_closure(depth, motive, None)),
                scrutinee: t,
                body: Rc::new(self.quote_closure(depth, body, None)),
            },
            Elim::Absurd(m) => Term::Absurd(Rc::new(self.quote(depth, m)), t),
        }
    }

    /// Evaluate and read back a closed term.
    pub fn normal_form(&self, t: &Term) -> Term {
        self.quote(0, &self.eval(&crate::nbe::Env::new(), t))
    }
}
