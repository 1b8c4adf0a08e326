//! Core terms.
//!
//! Variables are de Bruijn indices; binders keep their source name only for
//! printing. Everything the corpus postulates (the interval, path and graph
//! types, naturals, the circle) is a [`Term::Const`]; only the formers with
//! built-in computation rules live here.

use std::fmt;
use std::rc::Rc;

pub type Name = Rc<str>;

pub fn name(s: &str) -> Name {
    Rc::from(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Plicity {
    Explicit,
    Implicit,
}

impl Plicity {
    pub fn is_implicit(self) -> bool {
        self == Plicity::Implicit
    }
}

/// A binder annotation: name, plicity and whether the bound variable is crisp.
#[derive(Clone, Debug)]
pub struct Binder {
    pub name: Name,
    pub plicity: Plicity,
    pub crisp: bool,
}

impl Binder {
    pub fn explicit(name: &str) -> Binder {
        Binder {
            name: Rc::from(name),
            plicity: Plicity::Explicit,
            crisp: false,
        }
    }
}

impl PartialEq for Binder {
    // names are irrelevant to alpha-equivalence
    fn eq(&self, other: &Binder) -> bool {
        self.plicity == other.plicity && self.crisp == other.crisp
    }
}

impl Eq for Binder {}

/// A variable name kept only for printing; every two hints are equal.
#[derive(Clone, Debug)]
pub struct Hint(pub Name);

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}

impl Eq for Hint {}

impl std::ops::Deref for Hint {
    type Target = Name;

    fn deref(&self) -> &Name {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universe {
    /// `Set ℓ` with ℓ a level term.
    Set(Rc<Term>),
    /// The top sort housing `Setω` types; not itself a member of anything.
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(usize),
    Const(Name),
    Meta(u32),

    Universe(Universe),
    LevelType,
    LevelZero,
    LevelSuc(Rc<Term>),
    LevelMax(Rc<Term>, Rc<Term>),

    Pi(Binder, Rc<Term>, Rc<Term>),
    Lam(Binder, Rc<Term>),
    App(Rc<Term>, Rc<Term>, Plicity),

    Sigma(Hint, Rc<Term>, Rc<Term>),
    Pair(Rc<Term>, Rc<Term>),
    Fst(Rc<Term>),
    Snd(Rc<Term>),

    /// `Id A a b`.
    IdType(Rc<Term>, Rc<Term>, Rc<Term>),
    Refl,
    /// Based path induction. The motive binds the right endpoint and the
    /// proof (two binders); `base` inhabits the motive at `refl`.
    J {
        motive: Rc<Term>,
        base: Rc<Term>,
        target: Rc<Term>,
    },

    Unit,
    TT,
    Empty,
    Absurd(Rc<Term>, Rc<Term>),
    Bool,
    True,
    False,
    /// Case analysis on Bool. The motive binds one variable; when `crisp` is
    /// set that variable is crisp and the target is checked in a crisp
    /// position.
    BoolElim {
        motive: Rc<Term>,
        crisp: bool,
        t_case: Rc<Term>,
        f_case: Rc<Term>,
        target: Rc<Term>,
    },

    Flat(Rc<Term>),
    FlatCon(Rc<Term>),
    /// `let con y = scrutinee in body`; motive binds `z : Flat A`, body binds
    /// crisp `y : A`.
    FlatElim {
        motive: Rc<Term>,
        scrutinee: Rc<Term>,
        body: Rc<Term>,
    },
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn constant(n: &str) -> Term {
        Term::Const(Rc::from(n))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Rc::new(f), Rc::new(a), Plicity::Explicit)
    }

    pub fn app_implicit(f: Term, a: Term) -> Term {
        Term::App(Rc::new(f), Rc::new(a), Plicity::Implicit)
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(Binder::explicit(x), Rc::new(body))
    }

    pub fn pi(x: &str, dom: Term, cod: Term) -> Term {
        Term::Pi(Binder::explicit(x), Rc::new(dom), Rc::new(cod))
    }

    pub fn set(level: Term) -> Term {
        Term::Universe(Universe::Set(Rc::new(level)))
    }

    pub fn set0() -> Term {
        Term::set(Term::LevelZero)
    }

    /// Head and argument spine of an application chain.
    pub fn spine(&self) -> (&Term, Vec<(&Term, Plicity)>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a, p) = t {
            args.push((a.as_ref(), *p));
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// Whether the variable with index `i` (relative to this term) occurs free.
    pub fn has_free_var(&self, i: usize) -> bool {
        let mut found = false;
        self.visit_vars(0, &mut |idx, depth| {
            if idx >= depth && idx - depth == i {
                found = true;
            }
        });
        found
    }

    /// Every free variable index, relative to this term.
    pub fn free_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_vars(0, &mut |idx, depth| {
            if idx >= depth {
                out.push(idx - depth);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn mentions_meta(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if matches!(t, Term::Meta(_)) {
                found = true;
            }
        });
        found
    }

    pub fn mentions_const(&self, n: &str) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if let Term::Const(c) = t {
                if c.as_ref() == n {
                    found = true;
                }
            }
        });
        found
    }

    /// Pre-order traversal of every subterm.
    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        self.for_each_child(&mut |_, c| c.visit(f));
    }

    fn visit_vars(&self, depth: usize, f: &mut dyn FnMut(usize, usize)) {
        if let Term::Var(i) = self {
            f(*i, depth);
        }
        self.for_each_child(&mut |extra, c| c.visit_vars(depth + extra, f));
    }

    /// Call `f(binders_entered, child)` for each immediate subterm.
    pub fn for_each_child(&self, f: &mut dyn FnMut(usize, &Term)) {
        match self {
            Term::Var(_)
            | Term::Const(_)
            | Term::Meta(_)
            | Term::LevelType
            | Term::LevelZero
            | Term::Refl
            | Term::Unit
            | Term::TT
            | Term::Empty
            | Term::Bool
            | Term::True
            | Term::False
            | Term::Universe(Universe::Omega) => {}
            Term::Universe(Universe::Set(l)) => f(0, l),
            Term::LevelSuc(a) | Term::Fst(a) | Term::Snd(a) | Term::Flat(a) | Term::FlatCon(a) => {
                f(0, a)
            }
            Term::LevelMax(a, b) | Term::Pair(a, b) | Term::App(a, b, _) | Term::Absurd(a, b) => {
                f(0, a);
                f(0, b);
            }
            Term::Pi(_, a, b) | Term::Sigma(_, a, b) => {
                f(0, a);
                f(1, b);
            }
            Term::Lam(_, b) => f(1, b),
            Term::IdType(a, b, c) => {
                f(0, a);
                f(0, b);
                f(0, c);
            }
            Term::J {
                motive,
                base,
                target,
            } => {
                f(2, motive);
                f(0, base);
                f(0, target);
            }
            Term::BoolElim {
                motive,
                t_case,
                f_case,
                target,
                ..
            } => {
                f(1, motive);
                f(0, t_case);
                f(0, f_case);
                f(0, target);
            }
            Term::FlatElim {
                motive,
                scrutinee,
                body,
            } => {
                f(1, motive);
                f(0, scrutinee);
                f(1, body);
            }
        }
    }

    /// Rebuild the term, mapping each immediate child with `f(binders_entered, child)`.
    pub fn map_children(&self, f: &mut dyn FnMut(usize, &Term) -> Term) -> Term {
        let mut g = |k: usize, t: &Rc<Term>| Rc::new(f(k, t));
        match self {
            Term::Var(_)
            | Term::Const(_)
            | Term::Meta(_)
            | Term::LevelType
            | Term::LevelZero
            | Term::Refl
            | Term::Unit
            | Term::TT
            | Term::Empty
            | Term::Bool
            | Term::True
            | Term::False
            | Term::Universe(Universe::Omega) => self.clone(),
            Term::Universe(Universe::Set(l)) => Term::Universe(Universe::Set(g(0, l))),
            Term::LevelSuc(a) => Term::LevelSuc(g(0, a)),
            Term::LevelMax(a, b) => Term::LevelMax(g(0, a), g(0, b)),
            Term::Pi(x, a, b) => Term::Pi(x.clone(), g(0, a), g(1, b)),
            Term::Lam(x, b) => Term::Lam(x.clone(), g(1, b)),
            Term::App(a, b, p) => Term::App(g(0, a), g(0, b), *p),
            Term::Sigma(x, a, b) => Term::Sigma(x.clone(), g(0, a), g(1, b)),
            Term::Pair(a, b) => Term::Pair(g(0, a), g(0, b)),
            Term::Fst(a) => Term::Fst(g(0, a)),
            Term::Snd(a) => Term::Snd(g(0, a)),
            Term::IdType(a, b, c) => Term::IdType(g(0, a), g(0, b), g(0, c)),
            Term::J {
                motive,
                base,
                target,
            } => Term::J {
                motive: g(2, motive),
                base: g(0, base),
                target: g(0, target),
            },
            Term::Absurd(a, b) => Term::Absurd(g(0, a), g(0, b)),
            Term::BoolElim {
                motive,
                crisp,
                t_case,
                f_case,
                target,
            } => Term::BoolElim {
                motive: g(1, motive),
                crisp: *crisp,
                t_case: g(0, t_case),
                f_case: g(0, f_case),
                target: g(0, target),
            },
            Term::Flat(a) => Term::Flat(g(0, a)),
            Term::FlatCon(a) => Term::FlatCon(g(0, a)),
            Term::FlatElim {
                motive,
                scrutinee,
                body,
            } => Term::FlatElim {
                motive: g(1, motive),
                scrutinee: g(0, scrutinee),
                body: g(1, body),
            },
        }
    }
}

/// Shift free variables at or above `cutoff` by `by`.
pub fn shift(t: &Term, by: isize, cutoff: usize) -> Term {
    match t {
        Term::Var(i) if *i >= cutoff => {
            let j = *i as isize + by;
            assert!(j >= 0, "shift produced a negative index");
            Term::Var(j as usize)
        }
        Term::Var(_) => t.clone(),
        _ => t.map_children(&mut |k, c| shift(c, by, cutoff + k)),
    }
}

/// Simultaneous capture-avoiding substitution.
///
/// `subst[i]` replaces free variable `i`; free variables beyond the end of
/// `subst` are renumbered down by `subst.len()` (the substituted binders are
/// consumed). Replacement terms live in the outer context.
pub fn substitute(t: &Term, subst: &[Term]) -> Term {
    fn go(t: &Term, subst: &[Term], depth: usize) -> Term {
        match t {
            Term::Var(i) if *i < depth => t.clone(),
            Term::Var(i) => {
                let j = i - depth;
                match subst.get(j) {
                    Some(r) => shift(r, depth as isize, 0),
                    None => Term::Var(i - subst.len()),
                }
            }
            _ => t.map_children(&mut |k, c| go(c, subst, depth + k)),
        }
    }
    go(t, subst, 0)
}

/// Substitute for variable 0 only: `body[0 ↦ arg]`.
pub fn instantiate(body: &Term, arg: &Term) -> Term {
    substitute(body, std::slice::from_ref(arg))
}

/// Strip leading Pi binders, returning the binders (outermost first) and the body.
pub fn pi_telescope(t: &Term) -> (Vec<(Binder, Rc<Term>)>, &Term) {
    let mut out = Vec::new();
    let mut cur = t;
    while let Term::Pi(b, dom, cod) = cur {
        out.push((b.clone(), dom.clone()));
        cur = cod;
    }
    (out, cur)
}

/// Number of leading lambdas.
pub fn lambda_arity(t: &Term) -> usize {
    let mut n = 0;
    let mut cur = t;
    while let Term::Lam(_, b) = cur {
        n += 1;
        cur = b;
    }
    n
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::pretty::print_closed(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn substitute_var_zero() {
        assert_eq!(substitute(&Term::Var(0), &[Term::TT]), Term::TT);
    }

    #[test]
    fn substitute_under_binder() {
        // Lam(Var 1)[0 ↦ TT] = Lam(TT)
        let t = Term::lam("x", Term::Var(1));
        assert_eq!(substitute(&t, &[Term::TT]), Term::lam("x", Term::TT));
        // a replacement mentioning an outer variable gets shifted under the binder
        let t = Term::lam("x", Term::Var(1));
        assert_eq!(
            substitute(&t, &[Term::Var(5)]),
            Term::lam("x", Term::Var(6))
        );
        // unsubstituted variables move down past the consumed binder
        assert_eq!(substitute(&Term::Var(2), &[Term::TT]), Term::Var(1));
    }

    /// Terms whose free variables are all below `n`.
    pub(crate) fn arb_term(n: usize) -> BoxedStrategy<Term> {
        let leaf = prop_oneof![
            Just(Term::TT),
            Just(Term::True),
            Just(Term::Refl),
            Just(Term::constant("c")),
            (0..n.max(1)).prop_map(Term::Var),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
                inner.clone().prop_map(|b| Term::lam("x", b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pi("x", a, b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::Pair(Rc::new(a), Rc::new(b))),
                (inner.clone(), inner.clone(), inner).prop_map(|(m, b, t)| Term::J {
                    motive: Rc::new(m),
                    base: Rc::new(b),
                    target: Rc::new(t),
                }),
            ]
        })
        .boxed()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        // t[σ][τ] = t[σ;τ] where (σ;τ)(i) = σ(i)[τ]
        #[test]
        fn substitution_composes(
            t in arb_term(3),
            s0 in arb_term(2), s1 in arb_term(2), s2 in arb_term(2),
            u0 in arb_term(1), u1 in arb_term(1),
        ) {
            let sigma = [s0, s1, s2];
            let tau = [u0, u1];
            let lhs = substitute(&substitute(&t, &sigma), &tau);
            let composed: Vec<Term> = sigma.iter().map(|s| substitute(s, &tau)).collect();
            let rhs = substitute(&t, &composed);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn shift_round_trip(t in arb_term(4)) {
            prop_assert_eq!(shift(&shift(&t, 3, 0), -3, 0), t);
        }
    }
}
