use std::collections::HashSet;
use std::rc::Rc;

use crate::level::LevelAtom;
use crate::nbe::{convertible, Closure, Elim, Env, Evaluator, Head, Val, Value};
use crate::rewrite::pattern::Pattern;
use crate::rewrite::RewriteRule;
use crate::syntax::{Binder, Term};

/// One more than the highest variable level a value can mention.
///
/// Rules fire inside arbitrary contexts the evaluator knows nothing about,
/// so fresh variables for matching under binders are allocated above this.
pub(crate) fn level_bound(ev: &Evaluator<'_>, vals: &[Val]) -> usize {
    let mut seen: HashSet<*const Value> = HashSet::new();
    let mut bound = 0;
    let mut stack: Vec<Val> = vals.to_vec();
    let push_closure =
        |c: &Closure, stack: &mut Vec<Val>| stack.extend(c.env.values().iter().cloned());
    while let Some(v) = stack.pop() {
        if !seen.insert(Rc::as_ptr(&v)) {
            continue;
        }
        match &*v {
            Value::Universe(crate::nbe::Sort::Set(l)) | Value::Level(l) => {
                for (a, _) in l.atoms() {
                    match a {
                        LevelAtom::Var(x) => bound = bound.max(x + 1),
                        LevelAtom::Meta(m) => {
                            if let Some(ms) = ev.metas {
                                bound = bound.max(ms.entry(m).depth);
                            }
                        }
                    }
                }
            }
            Value::Universe(_)
            | Value::LevelType
            | Value::Refl
            | Value::Unit
            | Value::TT
            | Value::Empty
            | Value::Bool
            | Value::True
            | Value::False => {}
            Value::Pi(_, a, c) | Value::Sigma(_, a, c) => {
                stack.push(a.clone());
                push_closure(c, &mut stack);
            }
            Value::Lam(_, c) => push_closure(c, &mut stack),
            Value::Pair(a, b) => {
                stack.push(a.clone());
                stack.push(b.clone());
            }
            Value::IdType(a, b, c) => stack.extend([a.clone(), b.clone(), c.clone()]),
            Value::Flat(a) | Value::FlatCon(a) => stack.push(a.clone()),
            Value::Neutral(h, sp) => {
                match h {
                    Head::Var(x) => bound = bound.max(x + 1),
                    Head::Meta(m) => {
                        if let Some(ms) = ev.metas {
                            bound = bound.max(ms.entry(*m).depth);
                        }
                    }
                    Head::Const(_) => {}
                }
                for e in sp.iter() {
                    match e {
                        Elim::App(a, _) | Elim::Absurd(a) => stack.push(a.clone()),
                        Elim::Fst | Elim::Snd => {}
                        Elim::J { motive, base } => {
                            push_closure(motive, &mut stack);
                            stack.push(base.clone());
                        }
                        Elim::BoolElim {
                            motive,
                            t_case,
                            f_case,
                            ..
                        } => {
                            push_closure(motive, &mut stack);
                            stack.push(t_case.clone());
                            stack.push(f_case.clone());
                        }
                        Elim::FlatElim { motive, body } => {
                            push_closure(motive, &mut stack);
                            push_closure(body, &mut stack);
                        }
                    }
                }
            }
        }
    }
    bound
}

/// Rename a term at depth `base + m` (the last `m` levels being pattern
/// locals) to depth `base + xs.len()`, where local `xs[q]` becomes the
/// `q`-th new binder. Fails if another local occurs.
fn abstract_locals(t: &Term, base: usize, m: usize, xs: &[usize]) -> Option<Term> {
    fn go(t: &Term, base: usize, m: usize, xs: &[usize], d: usize) -> Option<Term> {
        match t {
            Term::Var(i) if *i < d => Some(t.clone()),
            Term::Var(i) => {
                let l = base + m - 1 - (i - d);
                let n = xs.len();
                if l < base {
                    Some(Term::Var(base + n - 1 - l + d))
                } else {
                    let q = xs.iter().position(|&x| x == l - base)?;
                    Some(Term::Var(n - 1 - q + d))
                }
            }
            _ => {
                let mut ok = true;
                let r = t.map_children(&mut |k, c| match go(c, base, m, xs, d + k) {
                    Some(c) => c,
                    None => {
                        ok = false;
                        Term::TT
                    }
                });
                ok.then_some(r)
            }
        }
    }
    go(t, base, m, xs, 0)
}

struct Matcher<'e, 'a> {
    ev: &'e Evaluator<'a>,
    args: &'e [Val],
    vals: Vec<Option<Val>>,
    checks: Vec<(Rc<Term>, Vec<Val>, Val)>,
    base: Option<usize>,
}

impl Matcher<'_, '_> {
    fn base(&mut self) -> usize {
        if self.base.is_none() {
            self.base = Some(level_bound(self.ev, self.args));
        }
        self.base.unwrap()
    }

    fn pat(&mut self, p: &Pattern, v: &Val, locals: &[Val]) -> bool {
        match p {
            Pattern::Bind(x) if locals.is_empty() => {
                self.vals[*x] = Some(v.clone());
                true
            }
            Pattern::Bind(x) => self.miller(*x, &[], v, locals.len()),
            Pattern::Miller(x, xs) => self.miller(*x, xs, v, locals.len()),
            Pattern::Const(c, ps) => {
                let v = self.ev.force(v);
                match v.as_const_app() {
                    Some((d, args)) if d == c && args.len() == ps.len() => {
                        let args: Vec<Val> = args.into_iter().cloned().collect();
                        ps.iter().zip(&args).all(|(p, a)| self.pat(p, a, locals))
                    }
                    _ => false,
                }
            }
            Pattern::Lam(pl, body) => {
                let x = Value::var(self.base() + locals.len());
                let applied = self.ev.apply(v, x.clone(), *pl);
                let mut inner = locals.to_vec();
                inner.push(x);
                self.pat(body, &applied, &inner)
            }
            Pattern::Check(t) => {
                self.checks.push((t.clone(), locals.to_vec(), v.clone()));
                true
            }
        }
    }

    fn miller(&mut self, x: usize, xs: &[usize], v: &Val, m: usize) -> bool {
        let base = self.base();
        let t = self.ev.quote(base + m, v);
        let Some(mut body) = abstract_locals(&t, base, m, xs) else {
            return false;
        };
        for _ in xs {
            body = Term::Lam(Binder::explicit("x"), Rc::new(body));
        }
        let env = Env::from_vec((0..base).map(Value::var).collect());
        self.vals[x] = Some(self.ev.eval(&env, &body));
        true
    }
}

/// Try to match `rule` against an argument spine; on success return the
/// values of the pattern variables.
pub(crate) fn match_rule(ev: &Evaluator<'_>, rule: &RewriteRule, args: &[Val]) -> Option<Vec<Val>> {
    let mut m = Matcher {
        ev,
        args,
        vals: vec![None; rule.var_names.len()],
        checks: Vec::new(),
        base: None,
    };
    for (p, v) in rule.patterns.iter().zip(args) {
        if !m.pat(p, v, &[]) {
            return None;
        }
    }
    let checks = std::mem::take(&mut m.checks);
    let base = if checks.is_empty() { 0 } else { m.base() };
    // Variables without a binding site are never referenced.
    let vals: Vec<Val> = m
        .vals
        .into_iter()
        .map(|v| v.unwrap_or_else(|| Rc::new(Value::TT)))
        .collect();
    for (t, locals, v) in checks {
        let depth = base + locals.len();
        let env = Env::from_vec(vals.iter().cloned().chain(locals).collect());
        let expected = ev.eval(&env, &t);
        if !convertible(*ev, depth, &expected, &v) {
            return None;
        }
    }
    Some(vals)
}

/// Instantiate the left-hand side with the matched values and compare with
/// the spine it was matched against.
pub(crate) fn verify_match(
    ev: &Evaluator<'_>,
    rule: &RewriteRule,
    args: &[Val],
    vals: &[Val],
) -> bool {
    let depth = level_bound(ev, args);
    let env = Env::from_vec(vals.to_vec());
    rule.args
        .iter()
        .zip(args)
        .all(|((t, _), v)| convertible(*ev, depth, &ev.eval(&env, t), v))
}
