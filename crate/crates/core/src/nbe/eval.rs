use std::cell::{Cell, RefCell};
use std::rc::Rc;

use crate::level::{Level, LevelAtom};
use crate::meta::MetaStore;
use crate::nbe::value::{Closure, Elim, Env, Head, Sort, Val, Value};
use crate::signature::{DeclKind, Signature};
use crate::syntax::{Name, Plicity, Term, Universe};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Rewrite-firing budget shared by one normalization or elaboration run.
///
/// Once the budget is spent, rules stop firing and the caller is expected
/// to notice [`Fuel::exhausted`] and report an error.
#[derive(Debug)]
pub struct Fuel {
    limit: u64,
    used: Cell<u64>,
    exhausted: Cell<bool>,
    check_matches: bool,
    violations: RefCell<Vec<String>>,
}

impl Fuel {
    pub fn new(limit: u64) -> Fuel {
        Fuel {
            limit,
            used: Cell::new(0),
            exhausted: Cell::new(false),
            check_matches: false,
            violations: RefCell::new(Vec::new()),
        }
    }

    /// Re-verify every successful match (match-soundness assertion).
    pub fn with_match_checking(mut self) -> Fuel {
        self.check_matches = true;
        self
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted.get()
    }

    pub fn checking_matches(&self) -> bool {
        self.check_matches
    }

    pub fn record_violation(&self, msg: String) {
        self.violations.borrow_mut().push(msg);
    }

    pub fn violations(&self) -> Vec<String> {
        self.violations.borrow().clone()
    }

    /// Try to spend one firing.
    pub(crate) fn take(&self) -> bool {
        if self.exhausted.get() {
            return false;
        }
        if self.used.get() >= self.limit {
            self.exhausted.set(true);
            return false;
        }
        self.used.set(self.used.get() + 1);
        true
    }
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel::new(DEFAULT_BUDGET)
    }
}

/// Evaluation context: the signature, the meta store (during elaboration),
/// and the rewrite budget.
#[derive(Clone, Copy)]
pub struct Evaluator<'a> {
    pub sig: &'a Signature,
    pub metas: Option<&'a MetaStore>,
    pub fuel: &'a Fuel,
}

impl<'a> Evaluator<'a> {
    pub fn new(sig: &'a Signature, fuel: &'a Fuel) -> Evaluator<'a> {
        Evaluator {
            sig,
            metas: None,
            fuel,
        }
    }

    pub fn with_metas(self, metas: &'a MetaStore) -> Evaluator<'a> {
        Evaluator {
            metas: Some(metas),
            ..self
        }
    }

    pub fn eval(&self, env: &Env, t: &Term) -> Val {
        match t {
            Term::Var(i) => env.index(*i).clone(),
            Term::Const(c) => self.eval_const(c),
            Term::Meta(m) => self.eval_meta(*m),
            Term::Universe(Universe::Set(l)) => {
                let l = self.eval(env, l);
                Value::set(self.as_level(&l))
            }
            Term::Universe(Universe::Omega) => Rc::new(Value::Universe(Sort::Omega)),
            Term::LevelType => Rc::new(Value::LevelType),
            Term::LevelZero => Rc::new(Value::Level(Level::zero())),
            Term::LevelSuc(a) => {
                let a = self.eval(env, a);
                Rc::new(Value::Level(self.as_level(&a).suc()))
            }
            Term::LevelMax(a, b) => {
                let a = self.eval(env, a);
                let b = self.eval(env, b);
                Rc::new(Value::Level(self.as_level(&a).lub(&self.as_level(&b))))
            }
            Term::Pi(b, a, c) => Rc::new(Value::Pi(
                b.clone(),
                self.eval(env, a),
                Closure {
                    env: env.clone(),
                    body: c.clone(),
                },
            )),
            Term::Lam(b, body) => Rc::new(Value::Lam(
                b.clone(),
                Closure {
                    env: env.clone(),
                    body: body.clone(),
                },
            )),
            Term::App(f, a, p) => {
                let f = self.eval(env, f);
                let a = self.eval(env, a);
                self.apply(&f, a, *p)
            }
            Term::Sigma(x, a, b) => Rc::new(Value::Sigma(
                x.0.clone(),
                self.eval(env, a),
                Closure {
                    env: env.clone(),
                    body: b.clone(),
                },
            )),
            Term::Pair(a, b) => Rc::new(Value::Pair(self.eval(env, a), self.eval(env, b))),
            Term::Fst(p) => {
                let p = self.eval(env, p);
                self.fst(&p)
            }
            Term::Snd(p) => {
                let p = self.eval(env, p);
                self.snd(&p)
            }
            Term::IdType(a, x, y) => Rc::new(Value::IdType(
                self.eval(env, a),
                self.eval(env, x),
                self.eval(env, y),
            )),
            Term::Refl => Rc::new(Value::Refl),
            Term::J {
                motive,
                base,
                target,
            } => {
                let motive = Closure {
                    env: env.clone(),
                    body: motive.clone(),
                };
                let base = self.eval(env, base);
                let target = self.eval(env, target);
                self.j(motive, base, &target)
            }
            Term::Unit => Rc::new(Value::Unit),
            Term::TT => Rc::new(Value::TT),
            Term::Empty => Rc::new(Value::Empty),
            Term::Absurd(m, t) => {
                let m = self.eval(env, m);
                let t = self.eval(env, t);
                self.elim(&t, Elim::Absurd(m))
            }
            Term::Bool => Rc::new(Value::Bool),
            Term::True => Rc::new(Value::True),
            Term::False => Rc::new(Value::False),
            Term::BoolElim {
                motive,
                crisp,
                t_case,
                f_case,
                target,
            } => {
                let motive = Closure {
                    env: env.clone(),
                    body: motive.clone(),
                };
                let t_case = self.eval(env, t_case);
                let f_case = self.eval(env, f_case);
                let target = self.eval(env, target);
                self.elim(
                    &target,
                    Elim::BoolElim {
                        motive,
                        crisp: *crisp,
                        t_case,
                        f_case,
                    },
                )
            }
            Term::Flat(a) => Rc::new(Value::Flat(self.eval(env, a))),
            Term::FlatCon(a) => Rc::new(Value::FlatCon(self.eval(env, a))),
            Term::FlatElim {
                motive,
                scrutinee,
                body,
            } => {
                let motive = Closure {
                    env: env.clone(),
                    body: motive.clone(),
                };
                let body = Closure {
                    env: env.clone(),
                    body: body.clone(),
                };
                let s = self.eval(env, scrutinee);
                self.elim(&s, Elim::FlatElim { motive, body })
            }
        }
    }

    fn eval_meta(&self, m: u32) -> Val {
        let metas = self
            .metas
            .expect("metavariable evaluated outside elaboration");
        match metas.solution(m) {
            Some(v) => v,
            None if metas.is_level(m) => Rc::new(Value::Level(Level::meta(m))),
            None => Value::meta(m),
        }
    }

    fn eval_const(&self, c: &Name) -> Val {
        let decl = self
            .sig
            .lookup(c)
            .unwrap_or_else(|| panic!("unknown constant {c} in checked term"));
        match decl.kind {
            DeclKind::Definition if !self.sig.has_rules_for(c) => {
                let body = decl.body.as_ref().expect("definition without body");
                self.eval(&Env::new(), body)
            }
            _ => self.after_const_app(c, Vec::new()),
        }
    }

    /// A definition that heads some rewrite rule is kept folded until it has
    /// all its arguments, so the rules get a chance to see it.
    fn is_lazy_definition(&self, c: &str) -> bool {
        matches!(self.sig.lookup(c), Some(d) if d.kind == DeclKind::Definition)
            && self.sig.has_rules_for(c)
    }

    fn unfold(&self, c: &str, spine: &[Elim]) -> Val {
        let decl = self.sig.lookup(c).expect("unfold of unknown constant");
        let body = decl.body.as_ref().expect("unfold of a postulate");
        let mut v = self.eval(&Env::new(), body);
        for e in spine {
            v = self.elim(&v, e.clone());
        }
        v
    }

    /// Called whenever a constant-headed spine of applications grows.
    fn after_const_app(&self, c: &Name, spine: Vec<Elim>) -> Val {
        if let Some(v) = crate::rewrite::rewrite_head(self, c, &spine) {
            return v;
        }
        if self.is_lazy_definition(c) {
            let decl = self.sig.lookup(c).unwrap();
            if spine.len() >= decl.arity() {
                // Unfolding to another stuck term would hide the head from
                // its rules once the blocking argument is later instantiated,
                // so such applications stay folded.
                let v = self.unfold(c, &spine);
                if !matches!(&*self.force(&v), Value::Neutral(..)) {
                    return v;
                }
            }
        }
        Rc::new(Value::Neutral(Head::Const(c.clone()), Rc::new(spine)))
    }

    /// Unfold a saturated application of a rule-headed definition that was
    /// kept folded. Conversion falls back on this when neutrals differ.
    pub fn unfold_folded(&self, v: &Value) -> Option<Val> {
        let Value::Neutral(Head::Const(c), spine) = v else {
            return None;
        };
        let saturated = self.is_lazy_definition(c)
            && spine.iter().all(|e| e.as_app().is_some())
            && spine.len() >= self.sig.lookup(c)?.arity();
        saturated.then(|| self.unfold(c, spine))
    }

    fn push_elim(&self, head: &Head, spine: &[Elim], e: Elim) -> Val {
        if let Head::Const(c) = head {
            if self.is_lazy_definition(c) && e.as_app().is_none() {
                let unfolded = self.unfold(c, spine);
                return self.elim(&unfolded, e);
            }
        }
        let mut sp = spine.to_vec();
        sp.push(e);
        if let Head::Const(c) = head {
            if sp.iter().all(|e| e.as_app().is_some()) {
                return self.after_const_app(c, sp);
            }
        }
        Rc::new(Value::Neutral(head.clone(), Rc::new(sp)))
    }

    pub fn elim(&self, v: &Val, e: Elim) -> Val {
        match e {
            Elim::App(a, p) => self.apply(v, a, p),
            Elim::Fst => self.fst(v),
            Elim::Snd => self.snd(v),
            Elim::J { motive, base } => self.j(motive, base, v),
            e @ (Elim::BoolElim { .. } | Elim::FlatElim { .. } | Elim::Absurd(_)) => {
                let v = self.force(v);
                match (&*v, e) {
                    (Value::True, Elim::BoolElim { t_case, .. }) => t_case,
                    (Value::False, Elim::BoolElim { f_case, .. }) => f_case,
                    (Value::FlatCon(x), Elim::FlatElim { body, .. }) => self.inst(&body, x.clone()),
                    (Value::Neutral(h, sp), e) => self.push_elim(h, sp, e),
                    (other, e) => panic!("ill-typed elimination {e:?} of {other:?}"),
                }
            }
        }
    }

    pub fn apply(&self, f: &Val, a: Val, p: Plicity) -> Val {
        let f = self.force(f);
        match &*f {
            Value::Lam(_, cl) => self.inst(cl, a),
            Value::Neutral(h, sp) => self.push_elim(h, sp, Elim::App(a, p)),
            other => panic!("application of a non-function {other:?}"),
        }
    }

    pub fn apply_all(&self, f: &Val, args: impl IntoIterator<Item = (Val, Plicity)>) -> Val {
        args.into_iter()
            .fold(f.clone(), |f, (a, p)| self.apply(&f, a, p))
    }

    pub fn fst(&self, v: &Val) -> Val {
        let v = self.force(v);
        match &*v {
            Value::Pair(a, _) => a.clone(),
            Value::Neutral(h, sp) => self.push_elim(h, sp, Elim::Fst),
            other => panic!("fst of a non-pair {other:?}"),
        }
    }

    pub fn snd(&self, v: &Val) -> Val {
        let v = self.force(v);
        match &*v {
            Value::Pair(_, b) => b.clone(),
            Value::Neutral(h, sp) => self.push_elim(h, sp, Elim::Snd),
            other => panic!("snd of a non-pair {other:?}"),
        }
    }

    pub fn j(&self, motive: Closure, base: Val, target: &Val) -> Val {
        let target = self.force(target);
        match &*target {
            Value::Refl => base,
            Value::Neutral(h, sp) => self.push_elim(h, sp, Elim::J { motive, base }),
            other => panic!("J on a non-identification {other:?}"),
        }
    }

    pub fn inst(&self, cl: &Closure, v: Val) -> Val {
        self.eval(&cl.env.extend(v), &cl.body)
    }

    pub fn inst2(&self, cl: &Closure, v: Val, w: Val) -> Val {
        self.eval(&cl.env.extend_many([v, w]), &cl.body)
    }

    /// Unfold solved metavariables at the head.
    pub fn force(&self, v: &Val) -> Val {
        let Some(metas) = self.metas else {
            return v.clone();
        };
        match &**v {
            Value::Neutral(Head::Meta(m), sp) => match metas.solution(*m) {
                Some(sol) => {
                    let mut r = sol;
                    for e in sp.iter() {
                        r = self.elim(&r, e.clone());
                    }
                    self.force(&r)
                }
                None => v.clone(),
            },
            Value::Level(l) => {
                let mut out = l.clone();
                let mut changed = false;
                for (a, _) in l.atoms() {
                    if let LevelAtom::Meta(m) = a {
                        if let Some(sol) = metas.solution(m) {
                            out = out.substitute(a, &self.as_level(&sol));
                            changed = true;
                        }
                    }
                }
                if changed {
                    Rc::new(Value::Level(out))
                } else {
                    v.clone()
                }
            }
            _ => v.clone(),
        }
    }

    /// View a value of type `Level` as a normal form.
    pub fn as_level(&self, v: &Val) -> Level {
        let v = self.force(v);
        match &*v {
            Value::Level(l) => l.clone(),
            Value::Neutral(Head::Var(k), sp) if sp.is_empty() => Level::var(*k),
            Value::Neutral(Head::Meta(m), sp) if sp.is_empty() => Level::meta(*m),
            other => panic!("expected a level, found {other:?}"),
        }
    }

    /// Like [`Evaluator::as_level`] but without panicking.
    pub fn try_level(&self, v: &Val) -> Option<Level> {
        let v = self.force(v);
        match &*v {
            Value::Level(l) => Some(l.clone()),
            Value::Neutral(Head::Var(k), sp) if sp.is_empty() => Some(Level::var(*k)),
            Value::Neutral(Head::Meta(m), sp) if sp.is_empty() => match self.metas {
                Some(ms) if ms.is_level(*m) => Some(Level::meta(*m)),
                _ => None,
            },
            _ => None,
        }
    }
}
