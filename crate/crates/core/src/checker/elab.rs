//! Bidirectional elaboration of surface terms into core terms.

use std::cell::{Cell, RefCell};
use std::rc::Rc;

use crate::checker::ctx::Context;
use crate::error::{Diagnostic, ErrorCode};
use crate::level::{Level, LevelAtom};
use crate::meta::{MetaEntry, MetaStore};
use crate::nbe::{Closure, Conv, Elim, Env, Evaluator, Fuel, Head, Solver, Sort, Val, Value};
use crate::parser::ast::{Arg, Group, LamBinder, SKind, STerm};
use crate::parser::Span;
use crate::pretty::print_in;
use crate::signature::Signature;
use crate::syntax::{instantiate, name, shift, Binder, Hint, Plicity, Term, Universe};

pub type Result<T> = std::result::Result<T, Diagnostic>;

/// A unification problem set aside until more metas are solved.
struct Postponed {
    depth: usize,
    lhs: Val,
    rhs: Val,
    span: Span,
}

/// Per-declaration elaboration state.
pub struct Elab<'a> {
    pub sig: &'a Signature,
    pub metas: MetaStore,
    pub fuel: &'a Fuel,
    postponed: RefCell<Vec<Postponed>>,
    span: RefCell<Span>,
    /// Name being declared; a reference to it is a recursive definition.
    decl_name: String,
}

fn err<T>(code: ErrorCode, span: &Span, msg: impl Into<String>) -> Result<T> {
    Err(Diagnostic::new(code, span.clone(), msg))
}

/// Binders of a (possibly nested) surface lambda, and its innermost body.
/// Unsolved metas print as `_`; the context variables they are applied to
/// are noise in a message.
fn hide_meta_spines(t: &Term) -> Term {
    if let (Term::Meta(m), _) = t.spine() {
        return Term::Meta(*m);
    }
    t.map_children(&mut |_, c| hide_meta_spines(c))
}

fn lam_binders(t: &STerm) -> (Vec<&LamBinder>, &STerm) {
    let mut out = Vec::new();
    let mut cur = t;
    while let SKind::Lam(bs, body) = &*cur.kind {
        out.extend(bs.iter());
        cur = body;
    }
    (out, cur)
}

/// Sort of a Pi or Sigma type from the sorts of its parts. `var` is the
/// level of the bound variable.
pub(crate) fn binder_sort(var: usize, dom_is_level: bool, dom: &Sort, cod: &Sort) -> Sort {
    match (dom, cod) {
        (_, Sort::Omega) => Sort::Omega,
        _ if dom_is_level => match cod {
            Sort::Set(l) if l.mentions(LevelAtom::Var(var)) => Sort::Omega,
            s => s.clone(),
        },
        (Sort::Omega, _) => Sort::Omega,
        (Sort::Set(a), Sort::Set(b)) => Sort::Set(a.lub(b)),
    }
}

impl<'a> Elab<'a> {
    pub fn new(sig: &'a Signature, fuel: &'a Fuel, decl_name: &str, span: Span) -> Elab<'a> {
        Elab {
            sig,
            metas: MetaStore::new(),
            fuel,
            postponed: RefCell::new(Vec::new()),
            span: RefCell::new(span),
            decl_name: decl_name.to_string(),
        }
    }

    pub fn ev(&self) -> Evaluator<'_> {
        Evaluator::new(self.sig, self.fuel).with_metas(&self.metas)
    }

    pub fn eval(&self, ctx: &Context, t: &Term) -> Val {
        self.ev().eval(&ctx.env, t)
    }

    pub fn unify(&self, depth: usize, a: &Val, b: &Val) -> bool {
        Conv::with_solver(self.ev(), self).conv(depth, a, b)
    }

    /// A value printed in normal form, with the context's names.
    pub fn show(&self, ctx: &Context, v: &Val) -> String {
        let t = self.ev().quote(ctx.depth(), v);
        print_in(&ctx.name_refs(), &hide_meta_spines(&t))
    }

    fn set_span(&self, s: &Span) {
        *self.span.borrow_mut() = s.clone();
    }

    // ---- metavariables -------------------------------------------------

    /// A fresh metavariable of type `ty` in `ctx`. Term metas are
    /// contextual: the meta itself is closed, with a Pi type over the
    /// context, and the returned term applies it to every variable in
    /// scope, so it stays correct wherever the surrounding term is
    /// evaluated. Level metas are bare.
    pub fn fresh_meta(&self, ctx: &Context, ty: &Val, span: &Span, origin: Option<&str>) -> Term {
        let ev = self.ev();
        let level = matches!(&*ev.force(ty), Value::LevelType);
        let d = ctx.depth();
        let closed_ty = if level {
            ty.clone()
        } else {
            let mut t = ev.quote(d, ty);
            for i in (0..d).rev() {
                let b = Binder {
                    name: name(&ctx.names[i]),
                    plicity: Plicity::Explicit,
                    crisp: false,
                };
                t = Term::Pi(b, Rc::new(ev.quote(i, &ctx.types[i])), Rc::new(t));
            }
            ev.eval(&Env::new(), &t)
        };
        let m = self.metas.fresh(MetaEntry {
            depth: d,
            env: ctx.env.clone(),
            usable: ctx.usable.clone(),
            ty: closed_ty,
            level,
            solution: None,
            span: span.clone(),
            origin: origin.map(str::to_string),
        });
        if level {
            return Term::Meta(m);
        }
        (0..d).fold(Term::Meta(m), |f, i| {
            Term::App(Rc::new(f), Rc::new(Term::Var(d - 1 - i)), Plicity::Explicit)
        })
    }

    fn postpone(&self, depth: usize, lhs: Val, rhs: Val) {
        let span = self.span.borrow().clone();
        self.postponed.borrow_mut().push(Postponed {
            depth,
            lhs,
            rhs,
            span,
        });
    }

    /// Retry postponed problems until no more progress is made.
    pub fn solve_postponed(&self) -> Result<()> {
        loop {
            let problems = std::mem::take(&mut *self.postponed.borrow_mut());
            if problems.is_empty() {
                return Ok(());
            }
            let before = self.solved_count();
            let n = problems.len();
            for p in problems {
                self.set_span(&p.span);
                if !self.unify(p.depth, &p.lhs, &p.rhs) {
                    let names: Vec<String> = (0..p.depth).map(|i| format!("x{i}")).collect();
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    let ev = self.ev();
                    return err(
                        ErrorCode::TypeMismatch,
                        &p.span,
                        format!(
                            "cannot unify `{}` with `{}`",
                            print_in(&refs, &ev.quote(p.depth, &p.lhs)),
                            print_in(&refs, &ev.quote(p.depth, &p.rhs))
                        ),
                    );
                }
            }
            let stuck = self.postponed.borrow().len() >= n && self.solved_count() == before;
            if stuck {
                return Ok(());
            }
        }
    }

    pub fn has_postponed(&self) -> bool {
        !self.postponed.borrow().is_empty()
    }

    fn solved_count(&self) -> usize {
        (0..self.metas.len() as u32)
            .filter(|&m| self.metas.solution(m).is_some())
            .count()
    }

    fn bound_var(&self, v: &Val) -> Option<usize> {
        match &*self.ev().force(v) {
            Value::Neutral(Head::Var(k), sp) if sp.is_empty() => Some(*k),
            Value::Level(l) => match l.as_single_atom() {
                Some((LevelAtom::Var(k), 0)) => Some(k),
                _ => None,
            },
            _ => None,
        }
    }

    /// Rename a term at `depth` into the scope of a solution for meta `m`,
    /// a closed function of `vars`. `b` counts binders entered inside the
    /// term. The first `e.depth` spine positions are the meta's own context
    /// and may only be mentioned where that context allowed it.
    fn rename(
        &self,
        t: &Term,
        depth: usize,
        b: usize,
        e: &MetaEntry,
        vars: &[usize],
        m: u32,
    ) -> Option<Term> {
        let n = vars.len();
        match t {
            Term::Var(i) if *i < b => Some(t.clone()),
            Term::Var(i) => {
                let lvl = depth - 1 - (i - b);
                let j = vars.iter().position(|&v| v == lvl)?;
                if j < e.depth && !e.usable[j] {
                    return None;
                }
                Some(Term::Var(b + n - 1 - j))
            }
            Term::Meta(k) if *k == m => None,
            Term::Meta(k) => {
                let other = self.metas.entry(*k);
                (!other.level || other.depth <= e.depth).then(|| t.clone())
            }
            _ => {
                let ok = Cell::new(true);
                let out =
                    t.map_children(&mut |k, c| match self.rename(c, depth, b + k, e, vars, m) {
                        Some(r) => r,
                        None => {
                            ok.set(false);
                            Term::TT
                        }
                    });
                ok.get().then_some(out)
            }
        }
    }

    fn solve_level(&self, a: &Level, b: &Level) -> Option<bool> {
        let (LevelAtom::Meta(m), k) = a.as_single_atom()? else {
            return None;
        };
        if self.metas.solution(m).is_some() {
            return None;
        }
        let e = self.metas.entry(m);
        let sol = b.minus(k)?;
        if sol.mentions(LevelAtom::Meta(m)) {
            return None;
        }
        for (atom, _) in sol.atoms() {
            if let LevelAtom::Var(v) = atom {
                // The variable must be a level variable of the meta's own
                // context, not one bound later at the same position.
                let is_level_var = e
                    .env
                    .values()
                    .get(v)
                    .is_some_and(|x| matches!(&**x, Value::Level(_)));
                if v >= e.depth || !e.usable[v] || !is_level_var {
                    return None;
                }
            }
        }
        self.metas.solve(m, Rc::new(Value::Level(sol)));
        Some(true)
    }

    fn has_level_meta(l: &Level) -> bool {
        l.atoms().any(|(a, _)| matches!(a, LevelAtom::Meta(_)))
    }

    // ---- zonking ---------------------------------------------------------

    /// Replace solved metas by their solutions in a term at `depth`.
    pub fn zonk(&self, depth: usize, t: &Term) -> Term {
        match t {
            Term::Meta(m) => match self.metas.solution(*m) {
                Some(v) => self.ev().quote(depth, &v),
                None => t.clone(),
            },
            Term::App(..) => {
                let (head, args) = t.spine();
                if let Term::Meta(m) = head {
                    if let Some(v) = self.metas.solution(*m) {
                        let mut f = self.ev().quote(depth, &v);
                        let mut rest = Vec::new();
                        for (a, p) in args {
                            let a = self.zonk(depth, a);
                            match (&f, rest.is_empty()) {
                                (Term::Lam(_, body), true) => f = instantiate(body, &a),
                                _ => rest.push((a, p)),
                            }
                        }
                        return rest
                            .into_iter()
                            .fold(f, |f, (a, p)| Term::App(Rc::new(f), Rc::new(a), p));
                    }
                }
                t.map_children(&mut |k, c| self.zonk(depth + k, c))
            }
            _ => t.map_children(&mut |k, c| self.zonk(depth + k, c)),
        }
    }

    /// The first unsolved meta mentioned by a term.
    pub fn unsolved_in(&self, t: &Term) -> Option<u32> {
        self.unsolved_where(t, |_| true)
    }

    /// The first unsolved meta that does not stand for a level.
    pub fn unsolved_term_meta(&self, t: &Term) -> Option<u32> {
        self.unsolved_where(t, |e| !e.level)
    }

    fn unsolved_where(&self, t: &Term, keep: impl Fn(&MetaEntry) -> bool) -> Option<u32> {
        let mut found = None;
        t.visit(&mut |s| {
            if let Term::Meta(m) = s {
                if found.is_none()
                    && self.metas.solution(*m).is_none()
                    && keep(&self.metas.entry(*m))
                {
                    found = Some(*m);
                }
            }
        });
        found
    }

    pub fn unsolved_error(&self, m: u32) -> Diagnostic {
        let e = self.metas.entry(m);
        let what = match &e.origin {
            Some(o) => {
                format!("cannot infer the implicit argument `{o}`; pass it as `{{{o} := ...}}`")
            }
            None => "cannot solve this hole".to_string(),
        };
        Diagnostic::new(ErrorCode::UnsolvedMeta, e.span, what)
    }

    // ---- sorts -----------------------------------------------------------

    /// The sort a type value lives in.
    pub fn sort_of(&self, ctx: &Context, ty: &Val) -> Option<Sort> {
        let ev = self.ev();
        let ty = ev.force(ty);
        match &*ty {
            Value::Universe(Sort::Set(l)) => Some(Sort::Set(l.suc())),
            Value::Universe(Sort::Omega) | Value::LevelType => Some(Sort::Omega),
            Value::Unit | Value::Empty | Value::Bool => Some(Sort::Set(Level::zero())),
            Value::IdType(a, _, _) | Value::Flat(a) => self.sort_of(ctx, a),
            Value::Pi(_, dom, cod) | Value::Sigma(_, dom, cod) => {
                let d = ctx.depth();
                let ds = self.sort_of(ctx, dom)?;
                let inner = ctx.bind("_", dom.clone(), false);
                let cs = self.sort_of(&inner, &ev.inst(cod, inner.env.index(0).clone()))?;
                let is_level = matches!(&*ev.force(dom), Value::LevelType);
                Some(binder_sort(d, is_level, &ds, &cs))
            }
            Value::Neutral(..) => match &*ev.force(&self.type_of_neutral(ctx, &ty)?) {
                Value::Universe(s) => Some(s.clone()),
                _ => None,
            },
            _ => None,
        }
    }

    /// Type of a neutral value, reconstructed from its head and spine.
    pub fn type_of_neutral(&self, ctx: &Context, v: &Val) -> Option<Val> {
        let ev = self.ev();
        let (head, spine) = v.as_neutral()?;
        let mut ty = match head {
            Head::Var(k) => ctx.types.get(*k)?.clone(),
            Head::Const(c) => ev.eval(&Env::new(), &self.sig.lookup(c)?.ty),
            Head::Meta(m) => self.metas.entry(*m).ty,
        };
        let mut cur: Val = Rc::new(Value::Neutral(head.clone(), Rc::new(Vec::new())));
        for e in spine.iter() {
            let fty = ev.force(&ty);
            ty = match (e, &*fty) {
                (Elim::App(a, _), Value::Pi(_, _, cod)) => ev.inst(cod, a.clone()),
                (Elim::Fst, Value::Sigma(_, a, _)) => a.clone(),
                (Elim::Snd, Value::Sigma(_, _, b)) => ev.inst(b, ev.fst(&cur)),
                (Elim::J { motive, .. }, Value::IdType(_, _, y)) => {
                    ev.inst2(motive, y.clone(), cur.clone())
                }
                (Elim::BoolElim { motive, .. }, _) => ev.inst(motive, cur.clone()),
                (Elim::FlatElim { motive, .. }, _) => ev.inst(motive, cur.clone()),
                (Elim::Absurd(m), _) => m.clone(),
                _ => return None,
            };
            cur = ev.elim(&cur, e.clone());
        }
        Some(ty)
    }

    // ---- variables and constants ---------------------------------------

    fn infer_var(&self, ctx: &Context, x: &str, span: &Span) -> Result<(Term, Val)> {
        if let Some((lvl, idx)) = ctx.lookup(x) {
            if !ctx.usable[lvl] {
                return err(
                    ErrorCode::Modal,
                    span,
                    format!("`{x}` is not crisp and cannot be used in a crisp position"),
                );
            }
            return Ok((Term::Var(idx), ctx.types[lvl].clone()));
        }
        if x == self.decl_name {
            return err(
                ErrorCode::Recursive,
                span,
                format!("`{x}` refers to itself; definitions may not be recursive"),
            );
        }
        match self.sig.lookup(x) {
            Some(d) => Ok((
                Term::Const(d.name.clone()),
                self.ev().eval(&Env::new(), &d.ty),
            )),
            None => err(ErrorCode::UnboundName, span, format!("unbound name `{x}`")),
        }
    }

    // ---- checking --------------------------------------------------------

    pub fn check(&self, ctx: &Context, t: &STerm, ty: &Val) -> Result<Term> {
        self.set_span(&t.span);
        let ev = self.ev();
        let fty = ev.force(ty);
        if let Value::Pi(pb, _, _) = &*fty {
            let explicit_lam = match &*t.kind {
                SKind::Lam(bs, _) => !bs[0].implicit,
                _ => true,
            };
            if pb.plicity.is_implicit() && explicit_lam {
                // A variable or application already of an implicit function
                // type is used as is; eta-expanding it would put level metas
                // under a binder they cannot be abstracted over.
                if matches!(&*t.kind, SKind::Var(_) | SKind::App(..)) {
                    let (tm, ity) = self.infer(ctx, t)?;
                    if matches!(&*ev.force(&ity), Value::Pi(b, _, _) if b.plicity.is_implicit()) {
                        return self.subsume(ctx, t, tm, ity, &fty);
                    }
                    return self.insert_lambda_over(ctx, t, tm, ity, &fty);
                }
                return self.insert_lambda(ctx, t, &fty);
            }
        }
        match (&*t.kind, &*fty) {
            (SKind::Lam(bs, body), _) => {
                let bs: Vec<&LamBinder> = bs.iter().collect();
                self.check_lam(ctx, &bs, body, &fty, &t.span)
            }
            (SKind::Pair(a, b), Value::Sigma(_, dom, cod)) => {
                let at = self.check(ctx, a, dom)?;
                let bty = ev.inst(cod, self.eval(ctx, &at));
                let bt = self.check(ctx, b, &bty)?;
                Ok(Term::Pair(Rc::new(at), Rc::new(bt)))
            }
            (SKind::Con(e), Value::Flat(a)) => {
                let et = self.check(&ctx.mask(), e, a)?;
                Ok(Term::FlatCon(Rc::new(et)))
            }
            (SKind::Refl, Value::IdType(_, x, y)) => {
                if self.unify(ctx.depth(), x, y) {
                    Ok(Term::Refl)
                } else {
                    err(
                        ErrorCode::TypeMismatch,
                        &t.span,
                        format!(
                            "refl cannot prove `{}` = `{}`",
                            self.show(ctx, x),
                            self.show(ctx, y)
                        ),
                    )
                }
            }
            (SKind::Hole, _) => Ok(self.fresh_meta(ctx, &fty, &t.span, None)),
            (
                SKind::LetCon {
                    name,
                    scrutinee,
                    motive: None,
                    body,
                },
                _,
            ) => {
                let (st, a) = self.infer_flat_scrutinee(ctx, scrutinee)?;
                let d = ctx.depth();
                let mt = ev.quote(d + 1, &fty);
                let inner = ctx.bind(name, a, true);
                let bt = self.check(&inner, body, &fty)?;
                Ok(Term::FlatElim {
                    motive: Rc::new(mt),
                    scrutinee: Rc::new(st),
                    body: Rc::new(bt),
                })
            }
            _ => {
                let (tm, ity) = self.infer(ctx, t)?;
                self.subsume(ctx, t, tm, ity, &fty)
            }
        }
    }

    /// Accept a term of type `ity` where `ty` is expected, inserting
    /// implicit applications first.
    fn subsume(&self, ctx: &Context, t: &STerm, tm: Term, ity: Val, ty: &Val) -> Result<Term> {
        let ev = self.ev();
        let expects_implicit =
            matches!(&*ev.force(ty), Value::Pi(b, _, _) if b.plicity.is_implicit());
        let (tm, ity) = if expects_implicit {
            (tm, ity)
        } else {
            self.insert_implicits(ctx, tm, ity, &t.span)?
        };
        let fity = ev.force(&ity);
        if let (Value::Universe(_), Value::Universe(Sort::Omega)) = (&*fity, &*ev.force(ty)) {
            return Ok(tm);
        }
        self.set_span(&t.span);
        if self.unify(ctx.depth(), &ity, ty) {
            Ok(tm)
        } else {
            err(
                ErrorCode::TypeMismatch,
                &t.span,
                format!(
                    "expected type `{}`, but this term has type `{}`",
                    self.show(ctx, ty),
                    self.show(ctx, &ity)
                ),
            )
        }
    }

    /// Like [`Elab::insert_lambda`] for a term already elaborated in `ctx`.
    fn insert_lambda_over(
        &self,
        ctx: &Context,
        t: &STerm,
        tm: Term,
        ity: Val,
        pi: &Val,
    ) -> Result<Term> {
        let Value::Pi(pb, dom, cod) = &**pi else {
            unreachable!()
        };
        let inner = ctx.bind(&format!("{{{}}}", pb.name), dom.clone(), pb.crisp);
        let cod_v = self.ev().inst(cod, inner.env.index(0).clone());
        let body = self.subsume(&inner, t, shift(&tm, 1, 0), ity, &cod_v)?;
        Ok(Term::Lam(pb.clone(), Rc::new(body)))
    }

    fn insert_lambda(&self, ctx: &Context, t: &STerm, pi: &Val) -> Result<Term> {
        let Value::Pi(pb, dom, cod) = &**pi else {
            unreachable!()
        };
        let inner = ctx.bind(&format!("{{{}}}", pb.name), dom.clone(), pb.crisp);
        let cod_v = self.ev().inst(cod, inner.env.index(0).clone());
        let body = self.check(&inner, t, &cod_v)?;
        Ok(Term::Lam(pb.clone(), Rc::new(body)))
    }

    fn check_lam(
        &self,
        ctx: &Context,
        bs: &[&LamBinder],
        body: &STerm,
        ty: &Val,
        span: &Span,
    ) -> Result<Term> {
        let Some((b, rest)) = bs.split_first() else {
            return self.check(ctx, body, ty);
        };
        let ev = self.ev();
        let fty = ev.force(ty);
        let Value::Pi(pb, dom, cod) = &*fty else {
            return err(
                ErrorCode::TypeMismatch,
                span,
                format!(
                    "expected type `{}`, but found a function",
                    self.show(ctx, &fty)
                ),
            );
        };
        if pb.plicity.is_implicit() && !b.implicit {
            let inner = ctx.bind(&format!("{{{}}}", pb.name), dom.clone(), pb.crisp);
            let cod_v = ev.inst(cod, inner.env.index(0).clone());
            let t = self.check_lam(&inner, bs, body, &cod_v, span)?;
            return Ok(Term::Lam(pb.clone(), Rc::new(t)));
        }
        if b.implicit && !pb.plicity.is_implicit() {
            return err(
                ErrorCode::TypeMismatch,
                span,
                format!(
                    "implicit binder `{{{}}}` where `{}` expects an explicit argument",
                    b.name,
                    self.show(ctx, &fty)
                ),
            );
        }
        if b.crisp && !pb.crisp {
            return err(
                ErrorCode::Modal,
                span,
                format!(
                    "binder `{}` is crisp but the expected function type is not",
                    b.name
                ),
            );
        }
        let inner = ctx.bind(&b.name, dom.clone(), pb.crisp);
        let cod_v = ev.inst(cod, inner.env.index(0).clone());
        let t = self.check_lam(&inner, rest, body, &cod_v, span)?;
        let binder = Binder {
            name: name(&b.name),
            plicity: pb.plicity,
            crisp: pb.crisp,
        };
        Ok(Term::Lam(binder, Rc::new(t)))
    }

    /// Apply a term to fresh metas while its type is an implicit Pi.
    fn insert_implicits(
        &self,
        ctx: &Context,
        mut tm: Term,
        mut ty: Val,
        span: &Span,
    ) -> Result<(Term, Val)> {
        let ev = self.ev();
        loop {
            let fty = ev.force(&ty);
            match &*fty {
                Value::Pi(b, dom, cod) if b.plicity.is_implicit() => {
                    let mctx = if b.crisp { ctx.mask() } else { ctx.clone() };
                    let m = self.fresh_meta(&mctx, dom, span, Some(&b.name));
                    ty = ev.inst(cod, self.eval(ctx, &m));
                    tm = Term::App(Rc::new(tm), Rc::new(m), Plicity::Implicit);
                }
                _ => return Ok((tm, ty)),
            }
        }
    }

    // ---- inference -------------------------------------------------------

    /// Elaborate a type, returning it with its sort.
    pub fn infer_type(&self, ctx: &Context, t: &STerm) -> Result<(Term, Sort)> {
        let (tm, ty) = self.infer(ctx, t)?;
        match &*self.ev().force(&ty) {
            Value::Universe(s) => Ok((tm, s.clone())),
            _ => err(
                ErrorCode::NotAType,
                &t.span,
                format!(
                    "expected a type, but this term has type `{}`",
                    self.show(ctx, &ty)
                ),
            ),
        }
    }

    fn check_level(&self, ctx: &Context, t: &STerm) -> Result<Term> {
        self.check(ctx, t, &Rc::new(Value::LevelType))
    }

    pub fn infer(&self, ctx: &Context, t: &STerm) -> Result<(Term, Val)> {
        self.set_span(&t.span);
        let ev = self.ev();
        let span = &t.span;
        let set0 = || Value::set(Level::zero());
        let level_ty = || Rc::new(Value::LevelType);
        match &*t.kind {
            SKind::Var(x) => self.infer_var(ctx, x, span),
            SKind::Hole => err(
                ErrorCode::CannotInfer,
                span,
                "cannot infer the type of a hole here",
            ),
            SKind::Set(l) => {
                let lt = self.check_level(ctx, l)?;
                let lv = ev.as_level(&self.eval(ctx, &lt));
                Ok((Term::set(lt), Value::set(lv.suc())))
            }
            SKind::SetOmega => err(
                ErrorCode::Universe,
                span,
                "SetOmega is not a member of any universe; it may only be the type of a declaration",
            ),
            SKind::Level => Ok((Term::LevelType, Rc::new(Value::Universe(Sort::Omega)))),
            SKind::LZero => Ok((Term::LevelZero, level_ty())),
            SKind::LSuc(a) => Ok((Term::LevelSuc(Rc::new(self.check_level(ctx, a)?)), level_ty())),
            SKind::Lub(a, b) => {
                let a = self.check_level(ctx, a)?;
                let b = self.check_level(ctx, b)?;
                Ok((Term::LevelMax(Rc::new(a), Rc::new(b)), level_ty()))
            }
            SKind::Pi(groups, cod) => {
                let binders = flatten_groups(groups);
                let (tm, s) = self.infer_pi(ctx, &binders, cod, false)?;
                Ok((tm, Rc::new(Value::Universe(s))))
            }
            SKind::Arrow(a, b) => {
                let g = Group {
                    names: vec!["_".to_string()],
                    ty: a.clone(),
                    implicit: false,
                    crisp: false,
                };
                let (tm, s) = self.infer_pi(ctx, &flatten_groups(std::slice::from_ref(&g)), b, false)?;
                Ok((tm, Rc::new(Value::Universe(s))))
            }
            SKind::Sigma(x, a, b) => self.infer_sigma(ctx, x, a, b),
            SKind::Prod(a, b) => self.infer_sigma(ctx, "_", a, b),
            SKind::Lam(..) => err(
                ErrorCode::CannotInfer,
                span,
                "cannot infer the type of a lambda; use it where a function type is expected",
            ),
            SKind::App(..) => self.infer_app(ctx, t),
            SKind::Pair(a, b) => {
                let (at, aty) = self.infer(ctx, a)?;
                let (bt, bty) = self.infer(ctx, b)?;
                let body = ev.quote(ctx.depth() + 1, &bty);
                let sig = Value::Sigma(
                    name("_"),
                    aty,
                    Closure {
                        env: ctx.env.clone(),
                        body: Rc::new(body),
                    },
                );
                Ok((Term::Pair(Rc::new(at), Rc::new(bt)), Rc::new(sig)))
            }
            SKind::Fst(p) | SKind::Snd(p) => {
                let (pt, pty) = self.infer(ctx, p)?;
                let Value::Sigma(_, a, b) = &*ev.force(&pty) else {
                    return err(
                        ErrorCode::TypeMismatch,
                        &p.span,
                        format!("expected a pair, but this term has type `{}`", self.show(ctx, &pty)),
                    );
                };
                if matches!(&*t.kind, SKind::Fst(_)) {
                    Ok((Term::Fst(Rc::new(pt)), a.clone()))
                } else {
                    let pv = self.eval(ctx, &pt);
                    Ok((Term::Snd(Rc::new(pt)), ev.inst(b, ev.fst(&pv))))
                }
            }
            SKind::Eq(a, b, None) => {
                let (at, aty) = self.infer(ctx, a)?;
                let bt = self.check(ctx, b, &aty)?;
                let Some(s) = self.sort_of(ctx, &aty) else {
                    return err(
                        ErrorCode::CannotInfer,
                        span,
                        "cannot determine the universe of this equation; write `a = b : A`",
                    );
                };
                let ty_t = ev.quote(ctx.depth(), &aty);
                Ok((
                    Term::IdType(Rc::new(ty_t), Rc::new(at), Rc::new(bt)),
                    Rc::new(Value::Universe(s)),
                ))
            }
            SKind::Eq(a, b, Some(ty)) | SKind::Id(ty, a, b) => {
                let (tt, s) = self.infer_type(ctx, ty)?;
                let tv = self.eval(ctx, &tt);
                let at = self.check(ctx, a, &tv)?;
                let bt = self.check(ctx, b, &tv)?;
                Ok((
                    Term::IdType(Rc::new(tt), Rc::new(at), Rc::new(bt)),
                    Rc::new(Value::Universe(s)),
                ))
            }
            SKind::Refl => err(
                ErrorCode::CannotInfer,
                span,
                "cannot infer the type of refl; use it where an identity type is expected",
            ),
            SKind::IdElim(m, d, p) => self.infer_id_elim(ctx, m, d, p, span),
            SKind::Unit => Ok((Term::Unit, set0())),
            SKind::Empty => Ok((Term::Empty, set0())),
            SKind::Bool => Ok((Term::Bool, set0())),
            SKind::TT => Ok((Term::TT, Rc::new(Value::Unit))),
            SKind::True => Ok((Term::True, Rc::new(Value::Bool))),
            SKind::False => Ok((Term::False, Rc::new(Value::Bool))),
            SKind::Absurd(m, e) => {
                let (mt, _) = self.infer_type(ctx, m)?;
                let et = self.check(ctx, e, &Rc::new(Value::Empty))?;
                let mv = self.eval(ctx, &mt);
                Ok((Term::Absurd(Rc::new(mt), Rc::new(et)), mv))
            }
            SKind::BoolElim(m, tc, fc, b) => self.infer_bool_elim(ctx, m, tc, fc, b, span),
            SKind::Flat(a) => {
                let (at, s) = self.infer_type(&ctx.mask(), a)?;
                match s {
                    Sort::Set(_) => Ok((Term::Flat(Rc::new(at)), Rc::new(Value::Universe(s)))),
                    Sort::Omega => err(
                        ErrorCode::Universe,
                        span,
                        "Flat applies only to types in some `Set l`",
                    ),
                }
            }
            SKind::Con(e) => {
                let (et, ety) = self.infer(&ctx.mask(), e)?;
                Ok((Term::FlatCon(Rc::new(et)), Rc::new(Value::Flat(ety))))
            }
            SKind::LetCon {
                name: y,
                scrutinee,
                motive,
                body,
            } => {
                let (st, a) = self.infer_flat_scrutinee(ctx, scrutinee)?;
                let sv = self.eval(ctx, &st);
                let d = ctx.depth();
                let inner = ctx.bind(y, a.clone(), true);
                match motive {
                    Some(m) => {
                        let (bs, mbody) = lam_binders(m);
                        if bs.len() != 1 {
                            return err(
                                ErrorCode::Internal,
                                &m.span,
                                "the motive of `let con` must be a lambda with one binder",
                            );
                        }
                        let zctx = ctx.bind(&bs[0].name, Rc::new(Value::Flat(a)), false);
                        let (mt, _) = self.infer_type(&zctx, mbody)?;
                        let yv = inner.env.index(0).clone();
                        let want = ev.eval(&ctx.env.extend(Rc::new(Value::FlatCon(yv))), &mt);
                        let bt = self.check(&inner, body, &want)?;
                        let res = ev.eval(&ctx.env.extend(sv), &mt);
                        Ok((
                            Term::FlatElim {
                                motive: Rc::new(mt),
                                scrutinee: Rc::new(st),
                                body: Rc::new(bt),
                            },
                            res,
                        ))
                    }
                    None => {
                        let (bt, bty) = self.infer(&inner, body)?;
                        let mt = ev.quote(d + 1, &bty);
                        if mt.has_free_var(0) {
                            return err(
                                ErrorCode::CannotInfer,
                                span,
                                format!("the type of the body depends on `{y}`; add `return \\z. ...`"),
                            );
                        }
                        Ok((
                            Term::FlatElim {
                                motive: Rc::new(mt),
                                scrutinee: Rc::new(st),
                                body: Rc::new(bt),
                            },
                            bty,
                        ))
                    }
                }
            }
        }
    }

    fn infer_flat_scrutinee(&self, ctx: &Context, s: &STerm) -> Result<(Term, Val)> {
        let (st, sty) = self.infer(ctx, s)?;
        match &*self.ev().force(&sty) {
            Value::Flat(a) => Ok((st, a.clone())),
            _ => err(
                ErrorCode::TypeMismatch,
                &s.span,
                format!(
                    "`let con` needs an element of a Flat type, but this term has type `{}`",
                    self.show(ctx, &sty)
                ),
            ),
        }
    }

    fn infer_id_elim(
        &self,
        ctx: &Context,
        m: &STerm,
        d: &STerm,
        p: &STerm,
        span: &Span,
    ) -> Result<(Term, Val)> {
        let ev = self.ev();
        let (pt, pty) = self.infer(ctx, p)?;
        let Value::IdType(a_ty, a, b) = &*ev.force(&pty) else {
            return err(
                ErrorCode::TypeMismatch,
                &p.span,
                format!(
                    "expected an identification, but this term has type `{}`",
                    self.show(ctx, &pty)
                ),
            );
        };
        let (bs, mbody) = lam_binders(m);
        if bs.len() != 2 {
            return err(
                ErrorCode::Internal,
                &m.span,
                "the motive of idElim must be a lambda with two binders",
            );
        }
        let yctx = ctx.bind(&bs[0].name, a_ty.clone(), false);
        let y = yctx.env.index(0).clone();
        let qty = Rc::new(Value::IdType(a_ty.clone(), a.clone(), y));
        let qctx = yctx.bind(&bs[1].name, qty, false);
        let (mt, _) = self.infer_type(&qctx, mbody)?;
        let at_refl = ev.eval(&ctx.env.extend_many([a.clone(), Rc::new(Value::Refl)]), &mt);
        let dt = self.check(ctx, d, &at_refl)?;
        let pv = self.eval(ctx, &pt);
        let res = ev.eval(&ctx.env.extend_many([b.clone(), pv]), &mt);
        let _ = span;
        Ok((
            Term::J {
                motive: Rc::new(mt),
                base: Rc::new(dt),
                target: Rc::new(pt),
            },
            res,
        ))
    }

    fn infer_bool_elim(
        &self,
        ctx: &Context,
        m: &STerm,
        tc: &STerm,
        fc: &STerm,
        b: &STerm,
        span: &Span,
    ) -> Result<(Term, Val)> {
        let ev = self.ev();
        let (bs, mbody) = lam_binders(m);
        if bs.len() != 1 {
            return err(
                ErrorCode::Internal,
                &m.span,
                "the motive of boolElim must be a lambda with one binder",
            );
        }
        let crisp = bs[0].crisp;
        let bool_ty = Rc::new(Value::Bool);
        let mctx = ctx.bind(&bs[0].name, bool_ty.clone(), crisp);
        let (mt, _) = self.infer_type(&mctx, mbody)?;
        let tctx = if crisp { ctx.mask() } else { ctx.clone() };
        let bt = self.check(&tctx, b, &bool_ty)?;
        let at = |v: Value| ev.eval(&ctx.env.extend(Rc::new(v)), &mt);
        let tt = self.check(ctx, tc, &at(Value::True))?;
        let ft = self.check(ctx, fc, &at(Value::False))?;
        let res = ev.eval(&ctx.env.extend(self.eval(ctx, &bt)), &mt);
        let _ = span;
        Ok((
            Term::BoolElim {
                motive: Rc::new(mt),
                crisp,
                t_case: Rc::new(tt),
                f_case: Rc::new(ft),
                target: Rc::new(bt),
            },
            res,
        ))
    }

    /// Pi telescope over `binders` ending in `cod`. With `allow_omega` the
    /// codomain may be `SetOmega` (declaration types only).
    pub fn infer_pi(
        &self,
        ctx: &Context,
        binders: &[(String, &Group)],
        cod: &STerm,
        allow_omega: bool,
    ) -> Result<(Term, Sort)> {
        self.infer_pi_from(ctx, binders, cod, allow_omega, None)
    }

    fn infer_pi_from(
        &self,
        ctx: &Context,
        binders: &[(String, &Group)],
        cod: &STerm,
        allow_omega: bool,
        // Domain already elaborated for an earlier name of the same group.
        prev: Option<(&Group, Term, Sort, usize)>,
    ) -> Result<(Term, Sort)> {
        let Some(((x, g), rest)) = binders.split_first() else {
            if allow_omega && matches!(&*cod.kind, SKind::SetOmega) {
                return Ok((Term::Universe(Universe::Omega), Sort::Omega));
            }
            return self.infer_type(ctx, cod);
        };
        let (dt, ds) = match prev {
            Some((pg, t, s, shift_by)) if std::ptr::eq(pg, *g) => {
                (shift(&t, shift_by as isize, 0), s)
            }
            _ => {
                let dctx = if g.crisp { ctx.mask() } else { ctx.clone() };
                self.infer_type(&dctx, &g.ty)?
            }
        };
        let dv = self.eval(ctx, &dt);
        let is_level = matches!(&*self.ev().force(&dv), Value::LevelType);
        let inner = ctx.bind(x, dv, g.crisp);
        let same_group_next = rest.first().is_some_and(|(_, ng)| std::ptr::eq(*ng, *g));
        let next_prev = same_group_next.then(|| (*g, dt.clone(), ds.clone(), 1));
        let (ct, cs) = self.infer_pi_from(&inner, rest, cod, allow_omega, next_prev)?;
        let sort = binder_sort(ctx.depth(), is_level, &ds, &cs);
        let binder = Binder {
            name: name(x),
            plicity: if g.implicit {
                Plicity::Implicit
            } else {
                Plicity::Explicit
            },
            crisp: g.crisp,
        };
        Ok((Term::Pi(binder, Rc::new(dt), Rc::new(ct)), sort))
    }

    fn infer_sigma(&self, ctx: &Context, x: &str, a: &STerm, b: &STerm) -> Result<(Term, Val)> {
        let (at, s1) = self.infer_type(ctx, a)?;
        let av = self.eval(ctx, &at);
        let is_level = matches!(&*self.ev().force(&av), Value::LevelType);
        let inner = ctx.bind(x, av, false);
        let (bt, s2) = self.infer_type(&inner, b)?;
        let s = binder_sort(ctx.depth(), is_level, &s1, &s2);
        Ok((
            Term::Sigma(Hint(name(x)), Rc::new(at), Rc::new(bt)),
            Rc::new(Value::Universe(s)),
        ))
    }

    fn infer_app(&self, ctx: &Context, t: &STerm) -> Result<(Term, Val)> {
        let ev = self.ev();
        let mut args = Vec::new();
        let mut h = t;
        while let SKind::App(f, a) = &*h.kind {
            args.push(a);
            h = f;
        }
        args.reverse();
        let (mut f, mut fty) = self.infer(ctx, h)?;
        for a in args {
            match a {
                Arg::Explicit(e) => {
                    (f, fty) = self.insert_implicits(ctx, f, fty, &e.span)?;
                    let forced = ev.force(&fty);
                    let Value::Pi(b, dom, cod) = &*forced else {
                        return err(
                            ErrorCode::NotAFunction,
                            &e.span,
                            format!(
                                "this argument is applied to a term of type `{}`, which is not a function type",
                                self.show(ctx, &fty)
                            ),
                        );
                    };
                    (f, fty) = self.apply_arg(ctx, f, b, dom, cod, e)?;
                }
                Arg::Implicit(e) => {
                    let forced = ev.force(&fty);
                    match &*forced {
                        Value::Pi(b, dom, cod) if b.plicity.is_implicit() => {
                            (f, fty) = self.apply_arg(ctx, f, b, dom, cod, e)?;
                        }
                        _ => {
                            return err(
                                ErrorCode::UnknownImplicit,
                                &e.span,
                                format!(
                                "no implicit argument expected here; the function has type `{}`",
                                self.show(ctx, &fty)
                            ),
                            )
                        }
                    }
                }
                Arg::Named(x, e) => loop {
                    let forced = ev.force(&fty);
                    match &*forced {
                        Value::Pi(b, dom, cod)
                            if b.plicity.is_implicit() && b.name.as_ref() == x =>
                        {
                            (f, fty) = self.apply_arg(ctx, f, b, dom, cod, e)?;
                            break;
                        }
                        Value::Pi(b, dom, cod) if b.plicity.is_implicit() => {
                            let mctx = if b.crisp { ctx.mask() } else { ctx.clone() };
                            let m = self.fresh_meta(&mctx, dom, &e.span, Some(&b.name));
                            fty = ev.inst(cod, self.eval(ctx, &m));
                            f = Term::App(Rc::new(f), Rc::new(m), Plicity::Implicit);
                        }
                        _ => {
                            return err(
                                ErrorCode::UnknownImplicit,
                                &e.span,
                                format!("no implicit argument named `{x}` here"),
                            )
                        }
                    }
                },
            }
        }
        Ok((f, fty))
    }

    fn apply_arg(
        &self,
        ctx: &Context,
        f: Term,
        b: &Binder,
        dom: &Val,
        cod: &Closure,
        e: &STerm,
    ) -> Result<(Term, Val)> {
        let actx = if b.crisp { ctx.mask() } else { ctx.clone() };
        let at = self.check(&actx, e, dom)?;
        let av = self.eval(ctx, &at);
        let fty = self.ev().inst(cod, av);
        Ok((Term::App(Rc::new(f), Rc::new(at), b.plicity), fty))
    }
}

/// `(x y : A)` becomes one entry per name, each pointing at its group.
pub fn flatten_groups(groups: &[Group]) -> Vec<(String, &Group)> {
    groups
        .iter()
        .flat_map(|g| g.names.iter().map(move |n| (n.clone(), g)))
        .collect()
}

impl Solver for Elab<'_> {
    fn flex(&self, depth: usize, m: u32, spine: &[Elim], other: &Val) -> bool {
        let e = self.metas.entry(m);
        let mut vars = Vec::new();
        let mut plic = Vec::new();
        let mut pattern = true;
        for el in spine {
            match el {
                Elim::App(a, p) => match self.bound_var(a) {
                    Some(k) if !vars.contains(&k) => {
                        vars.push(k);
                        plic.push(*p);
                    }
                    _ => {
                        pattern = false;
                        break;
                    }
                },
                _ => {
                    pattern = false;
                    break;
                }
            }
        }
        let lhs = || Rc::new(Value::Neutral(Head::Meta(m), Rc::new(spine.to_vec())));
        if !pattern {
            self.postpone(depth, lhs(), other.clone());
            return true;
        }
        let ev = self.ev();
        let t = ev.quote(depth, other);
        match self.rename(&t, depth, 0, &e, &vars, m) {
            Some(body) => {
                let sol = plic.iter().rev().fold(body, |acc, p| {
                    Term::Lam(
                        Binder {
                            name: name("x"),
                            plicity: *p,
                            crisp: false,
                        },
                        Rc::new(acc),
                    )
                });
                let v = ev.eval(&Env::new(), &sol);
                self.metas.solve(m, v);
                true
            }
            None => {
                if self.unsolved_in(&t).is_some_and(|k| k != m) {
                    self.postpone(depth, lhs(), other.clone());
                    true
                } else {
                    false
                }
            }
        }
    }

    fn level(&self, depth: usize, a: &Level, b: &Level) -> bool {
        if let Some(r) = self.solve_level(a, b) {
            return r;
        }
        if let Some(r) = self.solve_level(b, a) {
            return r;
        }
        if Elab::has_level_meta(a) || Elab::has_level_meta(b) {
            self.postpone(
                depth,
                Rc::new(Value::Level(a.clone())),
                Rc::new(Value::Level(b.clone())),
            );
            return true;
        }
        false
    }
}
