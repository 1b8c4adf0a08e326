//! A second, independent type checker for elaborated core terms.
//!
//! The elaborator's output is re-checked here before it enters the
//! signature. The kernel shares evaluation and conversion with the
//! elaborator but none of its inference machinery. Universe-level metas
//! left open by elaboration are solved on the way, from the universe
//! constraints the kernel encounters.

use std::rc::Rc;

use crate::checker::elab::binder_sort;
use crate::checker::{Context, Elab};
use crate::level::Level;
use crate::nbe::{Env, Sort, Val, Value};
use crate::pretty::print_in;
use crate::syntax::{Term, Universe};

pub type KResult<T> = Result<T, String>;

pub struct Kernel<'e, 'a> {
    el: &'e Elab<'a>,
}

impl<'e, 'a> Kernel<'e, 'a> {
    pub fn new(el: &'e Elab<'a>) -> Kernel<'e, 'a> {
        Kernel { el }
    }

    fn show(&self, ctx: &Context, v: &Val) -> String {
        self.el.show(ctx, v)
    }

    fn show_term(&self, ctx: &Context, t: &Term) -> String {
        print_in(&ctx.name_refs(), t)
    }

    fn eval(&self, ctx: &Context, t: &Term) -> Val {
        self.el.eval(ctx, t)
    }

    fn conv(&self, ctx: &Context, a: &Val, b: &Val) -> bool {
        self.el.unify(ctx.depth(), a, b)
    }

    /// A closed type (possibly `SetOmega`).
    pub fn check_type(&self, t: &Term) -> KResult<()> {
        self.check_decl_type(&Context::new(), t)
    }

    fn check_decl_type(&self, ctx: &Context, t: &Term) -> KResult<()> {
        match t {
            Term::Universe(Universe::Omega) => Ok(()),
            Term::Pi(b, a, c) => {
                let dctx = if b.crisp { ctx.mask() } else { ctx.clone() };
                self.sort(&dctx, a)?;
                let inner = ctx.bind(&b.name, self.eval(ctx, a), b.crisp);
                self.check_decl_type(&inner, c)
            }
            _ => self.sort(ctx, t).map(|_| ()),
        }
    }

    pub fn check_closed(&self, t: &Term, ty: &Val) -> KResult<()> {
        self.check(&Context::new(), t, ty)
    }

    /// The sort of a type.
    pub fn sort(&self, ctx: &Context, t: &Term) -> KResult<Sort> {
        let ty = self.infer(ctx, t)?;
        match &*self.el.ev().force(&ty) {
            Value::Universe(s) => Ok(s.clone()),
            _ => Err(format!(
                "`{}` is not a type; it has type `{}`",
                self.show_term(ctx, t),
                self.show(ctx, &ty)
            )),
        }
    }

    fn level(&self, ctx: &Context, t: &Term) -> KResult<Level> {
        self.check(ctx, t, &Rc::new(Value::LevelType))?;
        Ok(self.el.ev().as_level(&self.eval(ctx, t)))
    }

    pub fn check(&self, ctx: &Context, t: &Term, ty: &Val) -> KResult<()> {
        let ev = self.el.ev();
        let fty = ev.force(ty);
        match (t, &*fty) {
            (Term::Lam(b, body), Value::Pi(pb, dom, cod)) => {
                if b.plicity != pb.plicity || b.crisp != pb.crisp {
                    return Err("lambda binder does not match the function type".into());
                }
                let inner = ctx.bind(&b.name, dom.clone(), pb.crisp);
                let cv = ev.inst(cod, inner.env.index(0).clone());
                self.check(&inner, body, &cv)
            }
            (Term::Lam(..), _) => Err(format!(
                "lambda checked against non-function type `{}`",
                self.show(ctx, &fty)
            )),
            (Term::Pair(a, b), Value::Sigma(_, dom, cod)) => {
                self.check(ctx, a, dom)?;
                let bty = ev.inst(cod, self.eval(ctx, a));
                self.check(ctx, b, &bty)
            }
            (Term::Refl, Value::IdType(_, x, y)) => {
                if self.conv(ctx, x, y) {
                    Ok(())
                } else {
                    Err(format!(
                        "refl at `{}` = `{}`",
                        self.show(ctx, x),
                        self.show(ctx, y)
                    ))
                }
            }
            (Term::FlatCon(e), Value::Flat(a)) => self.check(&ctx.mask(), e, a),
            _ => {
                let ity = self.infer(ctx, t)?;
                let fity = ev.force(&ity);
                if let (Value::Universe(_), Value::Universe(Sort::Omega)) = (&*fity, &*fty) {
                    return Ok(());
                }
                if self.conv(ctx, &ity, &fty) {
                    Ok(())
                } else {
                    Err(format!(
                        "`{}` has type `{}` but `{}` was expected",
                        self.show_term(ctx, t),
                        self.show(ctx, &ity),
                        self.show(ctx, &fty)
                    ))
                }
            }
        }
    }

    pub fn infer(&self, ctx: &Context, t: &Term) -> KResult<Val> {
        let ev = self.el.ev();
        let set0 = || Value::set(Level::zero());
        match t {
            Term::Var(i) => {
                let lvl = ctx
                    .depth()
                    .checked_sub(i + 1)
                    .ok_or_else(|| format!("variable index {i} out of range"))?;
                if !ctx.usable[lvl] {
                    return Err(format!(
                        "non-crisp `{}` used in a crisp position",
                        ctx.names[lvl]
                    ));
                }
                Ok(ctx.types[lvl].clone())
            }
            Term::Const(c) => {
                let d = self
                    .el
                    .sig
                    .lookup(c)
                    .ok_or_else(|| format!("unknown constant `{c}`"))?;
                Ok(ev.eval(&Env::new(), &d.ty))
            }
            Term::Meta(m) => {
                let e = self.el.metas.entry(*m);
                if e.level {
                    Ok(e.ty)
                } else {
                    Err("unsolved metavariable".into())
                }
            }
            Term::Universe(Universe::Set(l)) => Ok(Value::set(self.level(ctx, l)?.suc())),
            Term::Universe(Universe::Omega) => Err("SetOmega has no type".into()),
            Term::LevelType => Ok(Rc::new(Value::Universe(Sort::Omega))),
            Term::LevelZero => Ok(Rc::new(Value::LevelType)),
            Term::LevelSuc(a) => {
                self.level(ctx, a)?;
                Ok(Rc::new(Value::LevelType))
            }
            Term::LevelMax(a, b) => {
                self.level(ctx, a)?;
                self.level(ctx, b)?;
                Ok(Rc::new(Value::LevelType))
            }
            Term::Pi(b, a, c) => {
                let dctx = if b.crisp { ctx.mask() } else { ctx.clone() };
                let ds = self.sort(&dctx, a)?;
                let av = self.eval(ctx, a);
                let is_level = matches!(&*ev.force(&av), Value::LevelType);
                let inner = ctx.bind(&b.name, av, b.crisp);
                let cs = self.sort(&inner, c)?;
                Ok(Rc::new(Value::Universe(binder_sort(
                    ctx.depth(),
                    is_level,
                    &ds,
                    &cs,
                ))))
            }
            Term::Sigma(x, a, b) => {
                let ds = self.sort(ctx, a)?;
                let av = self.eval(ctx, a);
                let is_level = matches!(&*ev.force(&av), Value::LevelType);
                let inner = ctx.bind(x, av, false);
                let cs = self.sort(&inner, b)?;
                Ok(Rc::new(Value::Universe(binder_sort(
                    ctx.depth(),
                    is_level,
                    &ds,
                    &cs,
                ))))
            }
            Term::Lam(..) => Err("cannot infer the type of a lambda".into()),
            Term::App(f, a, p) => {
                let fty = self.infer(ctx, f)?;
                match &*ev.force(&fty) {
                    Value::Pi(b, dom, cod) if b.plicity == *p => {
                        let actx = if b.crisp { ctx.mask() } else { ctx.clone() };
                        self.check(&actx, a, dom)?;
                        Ok(ev.inst(cod, self.eval(ctx, a)))
                    }
                    _ => Err(format!(
                        "`{}` of type `{}` applied to an argument",
                        self.show_term(ctx, f),
                        self.show(ctx, &fty)
                    )),
                }
            }
            Term::Pair(..) => Err("cannot infer the type of a pair".into()),
            Term::Fst(p) | Term::Snd(p) => {
                let pty = self.infer(ctx, p)?;
                match &*ev.force(&pty) {
                    Value::Sigma(_, a, b) => {
                        if matches!(t, Term::Fst(_)) {
                            Ok(a.clone())
                        } else {
                            Ok(ev.inst(b, ev.fst(&self.eval(ctx, p))))
                        }
                    }
                    _ => Err("projection from a non-pair".into()),
                }
            }
            Term::IdType(a, x, y) => {
                let s = self.sort(ctx, a)?;
                let av = self.eval(ctx, a);
                self.check(ctx, x, &av)?;
                self.check(ctx, y, &av)?;
                Ok(Rc::new(Value::Universe(s)))
            }
            Term::Refl => Err("cannot infer the type of refl".into()),
            Term::J {
                motive,
                base,
                target,
            } => {
                let pty = self.infer(ctx, target)?;
                let Value::IdType(aty, a, b) = &*ev.force(&pty) else {
                    return Err("J on a non-identification".into());
                };
                let yctx = ctx.bind("y", aty.clone(), false);
                let y = yctx.env.index(0).clone();
                let qctx = yctx.bind(
                    "p",
                    Rc::new(Value::IdType(aty.clone(), a.clone(), y)),
                    false,
                );
                self.sort(&qctx, motive)?;
                let at_refl = ev.eval(
                    &ctx.env.extend_many([a.clone(), Rc::new(Value::Refl)]),
                    motive,
                );
                self.check(ctx, base, &at_refl)?;
                let pv = self.eval(ctx, target);
                Ok(ev.eval(&ctx.env.extend_many([b.clone(), pv]), motive))
            }
            Term::Unit | Term::Empty | Term::Bool => Ok(set0()),
            Term::TT => Ok(Rc::new(Value::Unit)),
            Term::True | Term::False => Ok(Rc::new(Value::Bool)),
            Term::Absurd(m, e) => {
                self.sort(ctx, m)?;
                self.check(ctx, e, &Rc::new(Value::Empty))?;
                Ok(self.eval(ctx, m))
            }
            Term::BoolElim {
                motive,
                crisp,
                t_case,
                f_case,
                target,
            } => {
                let b = Rc::new(Value::Bool);
                self.sort(&ctx.bind("b", b.clone(), *crisp), motive)?;
                let tctx = if *crisp { ctx.mask() } else { ctx.clone() };
                self.check(&tctx, target, &b)?;
                let at = |v: Val| ev.eval(&ctx.env.extend(v), motive);
                self.check(ctx, t_case, &at(Rc::new(Value::True)))?;
                self.check(ctx, f_case, &at(Rc::new(Value::False)))?;
                Ok(at(self.eval(ctx, target)))
            }
            Term::Flat(a) => match self.sort(&ctx.mask(), a)? {
                s @ Sort::Set(_) => Ok(Rc::new(Value::Universe(s))),
                Sort::Omega => Err("Flat of an Omega-sorted type".into()),
            },
            Term::FlatCon(e) => {
                let ety = self.infer(&ctx.mask(), e)?;
                Ok(Rc::new(Value::Flat(ety)))
            }
            Term::FlatElim {
                motive,
                scrutinee,
                body,
            } => {
                let sty = self.infer(ctx, scrutinee)?;
                let Value::Flat(a) = &*ev.force(&sty) else {
                    return Err("let con on a non-Flat scrutinee".into());
                };
                self.sort(&ctx.bind("z", sty.clone(), false), motive)?;
                let inner = ctx.bind("y", a.clone(), true);
                let y = inner.env.index(0).clone();
                let want = ev.eval(&ctx.env.extend(Rc::new(Value::FlatCon(y))), motive);
                self.check(&inner, body, &want)?;
                Ok(ev.eval(&ctx.env.extend(self.eval(ctx, scrutinee)), motive))
            }
        }
    }
}
