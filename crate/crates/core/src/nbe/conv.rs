use crate::level::Level;
use crate::nbe::eval::Evaluator;
use crate::nbe::value::{Closure, Elim, Env, Head, Sort, Val, Value};
use crate::signature::DeclKind;
use crate::syntax::{Plicity, Term};

/// Hook through which conversion hands flexible problems to the elaborator.
pub trait Solver {
    /// `?m spine ≡ other`. Returns false only on a definite failure; a
    /// problem outside the pattern fragment may be postponed.
    fn flex(&self, depth: usize, m: u32, spine: &[Elim], other: &Val) -> bool;
    /// Two level normal forms that are not syntactically equal.
    fn level(&self, depth: usize, a: &Level, b: &Level) -> bool;
}

/// Definitional equality, optionally solving metavariables on the way.
pub struct Conv<'a> {
    pub ev: Evaluator<'a>,
    pub solver: Option<&'a dyn Solver>,
}

impl<'a> Conv<'a> {
    pub fn new(ev: Evaluator<'a>) -> Conv<'a> {
        Conv { ev, solver: None }
    }

    pub fn with_solver(ev: Evaluator<'a>, solver: &'a dyn Solver) -> Conv<'a> {
        Conv {
            ev,
            solver: Some(solver),
        }
    }

    pub fn conv(&self, depth: usize, a: &Val, b: &Val) -> bool {
        self.conv_inner(depth, a, b, true)
    }

    fn unsolved_meta<'v>(&self, v: &'v Value) -> Option<(u32, &'v [Elim])> {
        match v {
            Value::Neutral(Head::Meta(m), sp) => Some((*m, sp)),
            _ => None,
        }
    }

    /// Arity of a rule-headed definition that is applied to fewer arguments
    /// than it has lambdas, with the plicity of the next one.
    fn unsaturated(&self, v: &Value) -> Option<Plicity> {
        let (c, args) = v.as_const_app()?;
        let d = self.ev.sig.lookup(c)?;
        if d.kind != DeclKind::Definition || !self.ev.sig.has_rules_for(c) {
            return None;
        }
        let mut body: &Term = d.body.as_deref()?;
        for _ in 0..args.len() {
            match body {
                Term::Lam(_, b) => body = b,
                _ => return None,
            }
        }
        match body {
            Term::Lam(b, _) => Some(b.plicity),
            _ => None,
        }
    }

    fn conv_closure(&self, depth: usize, dom: Option<&Val>, c1: &Closure, c2: &Closure) -> bool {
        let x = match dom {
            Some(d) => Value::fresh_for(&self.ev.force(d), depth),
            None => Value::var(depth),
        };
        self.conv(
            depth + 1,
            &self.ev.inst(c1, x.clone()),
            &self.ev.inst(c2, x),
        )
    }

    fn conv_level(&self, depth: usize, a: &Level, b: &Level) -> bool {
        if crate::level::level_equal(a, b) {
            return true;
        }
        match self.solver {
            Some(s) => s.level(depth, a, b),
            None => false,
        }
    }

    fn conv_inner(&self, depth: usize, a: &Val, b: &Val, retry: bool) -> bool {
        let a = self.ev.force(a);
        let b = self.ev.force(b);

        if let (Some((m1, s1)), Some((m2, s2))) = (self.unsolved_meta(&a), self.unsolved_meta(&b)) {
            if m1 == m2 && s1.len() == s2.len() && self.conv_spine(depth, s1, s2) {
                return true;
            }
        }
        if let Some((m, sp)) = self.unsolved_meta(&a) {
            if let Some(s) = self.solver {
                return s.flex(depth, m, sp, &b);
            }
        }
        if let Some((m, sp)) = self.unsolved_meta(&b) {
            if let Some(s) = self.solver {
                return s.flex(depth, m, sp, &a);
            }
        }

        if matches!(&*a, Value::Level(_)) || matches!(&*b, Value::Level(_)) {
            return match (self.ev.try_level(&a), self.ev.try_level(&b)) {
                (Some(x), Some(y)) => self.conv_level(depth, &x, &y),
                _ => false,
            };
        }

        match (&*a, &*b) {
            (Value::Universe(Sort::Set(l1)), Value::Universe(Sort::Set(l2))) => {
                return self.conv_level(depth, l1, l2)
            }
            (Value::Universe(Sort::Omega), Value::Universe(Sort::Omega)) => return true,
            (Value::LevelType, Value::LevelType)
            | (Value::Refl, Value::Refl)
            | (Value::Unit, Value::Unit)
            | (Value::TT, Value::TT)
            | (Value::Empty, Value::Empty)
            | (Value::Bool, Value::Bool)
            | (Value::True, Value::True)
            | (Value::False, Value::False) => return true,
            (Value::Pi(b1, a1, c1), Value::Pi(b2, a2, c2)) => {
                return b1 == b2
                    && self.conv(depth, a1, a2)
                    && self.conv_closure(depth, Some(a1), c1, c2)
            }
            (Value::Sigma(_, a1, c1), Value::Sigma(_, a2, c2)) => {
                return self.conv(depth, a1, a2) && self.conv_closure(depth, Some(a1), c1, c2)
            }
            (Value::IdType(t1, x1, y1), Value::IdType(t2, x2, y2)) => {
                return self.conv(depth, t1, t2)
                    && self.conv(depth, x1, x2)
                    && self.conv(depth, y1, y2)
            }
            (Value::Flat(x), Value::Flat(y)) | (Value::FlatCon(x), Value::FlatCon(y)) => {
                return self.conv(depth, x, y)
            }
            (Value::Lam(_, c1), Value::Lam(_, c2)) => {
                return self.conv_closure(depth, None, c1, c2)
            }
            (Value::Lam(bn, c), _) => {
                let x = Value::var(depth);
                let rhs = self.ev.apply(&b, x.clone(), bn.plicity);
                return self.conv(depth + 1, &self.ev.inst(c, x), &rhs);
            }
            (_, Value::Lam(bn, c)) => {
                let x = Value::var(depth);
                let lhs = self.ev.apply(&a, x.clone(), bn.plicity);
                return self.conv(depth + 1, &lhs, &self.ev.inst(c, x));
            }
            (Value::Pair(x1, y1), Value::Pair(x2, y2)) => {
                return self.conv(depth, x1, x2) && self.conv(depth, y1, y2)
            }
            (Value::Pair(x, y), _) => {
                return self.conv(depth, x, &self.ev.fst(&b))
                    && self.conv(depth, y, &self.ev.snd(&b))
            }
            (_, Value::Pair(x, y)) => {
                return self.conv(depth, &self.ev.fst(&a), x)
                    && self.conv(depth, &self.ev.snd(&a), y)
            }
            (Value::Neutral(h1, s1), Value::Neutral(h2, s2))
                if h1 == h2 && s1.len() == s2.len() && self.conv_spine(depth, s1, s2) =>
            {
                return true
            }
            _ => {}
        }

        if let Some(a2) = self.ev.unfold_folded(&a) {
            return self.conv(depth, &a2, &b);
        }
        if let Some(b2) = self.ev.unfold_folded(&b) {
            return self.conv(depth, &a, &b2);
        }

        // A rule-headed definition missing arguments is a function: eta-expand.
        if let Some(p) = self.unsaturated(&a).or_else(|| self.unsaturated(&b)) {
            let x = Value::var(depth);
            let a2 = self.ev.apply(&a, x.clone(), p);
            let b2 = self.ev.apply(&b, x, p);
            return self.conv(depth + 1, &a2, &b2);
        }

        // Metavariables solved since these values were built may unblock
        // rewrite rules; rebuild both sides once.
        if retry && self.ev.metas.is_some() && is_stuck(&a, &b) {
            let env = Env::from_vec((0..depth).map(Value::var).collect());
            let a2 = self.ev.eval(&env, &self.ev.quote(depth, &a));
            let b2 = self.ev.eval(&env, &self.ev.quote(depth, &b));
            return self.conv_inner(depth, &a2, &b2, false);
        }
        false
    }

    fn conv_spine(&self, depth: usize, s1: &[Elim], s2: &[Elim]) -> bool {
        s1.iter()
            .zip(s2)
            .all(|(e1, e2)| self.conv_elim(depth, e1, e2))
    }

    fn conv_elim(&self, depth: usize, e1: &Elim, e2: &Elim) -> bool {
        match (e1, e2) {
            (Elim::App(a1, _), Elim::App(a2, _)) => self.conv(depth, a1, a2),
            (Elim::Fst, Elim::Fst) | (Elim::Snd, Elim::Snd) => true,
            (
                Elim::J {
                    motive: m1,
                    base: b1,
                },
                Elim::J {
                    motive: m2,
                    base: b2,
                },
            ) => {
                let (x, p) = (Value::var(depth), Value::var(depth + 1));
                self.conv(
                    depth + 2,
                    &self.ev.inst2(m1, x.clone(), p.clone()),
                    &self.ev.inst2(m2, x, p),
                ) && self.conv(depth, b1, b2)
            }
            (
                Elim::BoolElim {
                    motive: m1,
                    t_case: t1,
                    f_case: f1,
                    ..
                },
                Elim::BoolElim {
                    motive: m2,
                    t_case: t2,
                    f_case: f2,
                    ..
                },
            ) => {
                self.conv_closure(depth, None, m1, m2)
                    && self.conv(depth, t1, t2)
                    && self.conv(depth, f1, f2)
            }
            (
                Elim::FlatElim {
                    motive: m1,
                    body: b1,
                },
                Elim::FlatElim {
                    motive: m2,
                    body: b2,
                },
            ) => self.conv_closure(depth, None, m1, m2) && self.conv_closure(depth, None, b1, b2),
            (Elim::Absurd(m1), Elim::Absurd(m2)) => self.conv(depth, m1, m2),
            _ => false,
        }
    }
}

fn is_stuck(a: &Value, b: &Value) -> bool {
    matches!(a, Value::Neutral(..)) || matches!(b, Value::Neutral(..))
}

/// Convenience: closed-context conversion without metavariables.
pub fn convertible(ev: Evaluator<'_>, depth: usize, a: &Val, b: &Val) -> bool {
    Conv::new(ev).conv(depth, a, b)
}
