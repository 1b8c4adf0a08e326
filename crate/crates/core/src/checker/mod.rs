//! Elaboration of surface declarations into a checked [`Signature`].
//!
//! Each declaration is elaborated on its own: implicit arguments become
//! metavariables, solved by unification as the term is checked. Once the
//! declaration is complete its core terms are zonked, re-checked by the
//! small kernel in [`kernel`] (which also settles universe levels that only
//! universe constraints determine), scanned for modal violations and added
//! to the signature.

mod ctx;
mod elab;
pub mod kernel;
pub mod modal;

use std::rc::Rc;

pub use ctx::Context;
pub use elab::{flatten_groups, Elab};

use crate::error::{Diagnostic, ErrorCode};
use crate::nbe::{Env, Fuel, DEFAULT_BUDGET};
use crate::parser::ast::{DeclKeyword, LamBinder, SDecl, SKind, STerm};
use crate::parser::{parse_module, parse_term, Span};
use crate::rewrite::compile_rule;
use crate::signature::{rewrite_decl_name, DeclKind, Declaration, Signature};
use crate::syntax::{name, Term};

/// The context seen from a crisp position: non-crisp entries become unusable.
pub fn check_crisp_position(ctx: &Context) -> Context {
    ctx.mask()
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Rewrite firings allowed while checking one declaration.
    pub budget: u64,
    /// Verify every rule firing against the rule's left-hand side.
    pub check_matches: bool,
    /// Re-check each declaration with the kernel.
    pub kernel: bool,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions {
            budget: DEFAULT_BUDGET,
            check_matches: false,
            kernel: true,
        }
    }
}

/// Checks declarations one at a time into a growing signature.
#[derive(Debug, Default)]
pub struct Checker {
    sig: Signature,
    options: CheckOptions,
    violations: Vec<String>,
}

impl Checker {
    pub fn new() -> Checker {
        Checker::default()
    }

    pub fn with_options(options: CheckOptions) -> Checker {
        Checker {
            options,
            ..Checker::default()
        }
    }

    /// Continue checking on top of an existing signature.
    pub fn from_signature(sig: Signature, options: CheckOptions) -> Checker {
        Checker {
            sig,
            options,
            violations: Vec::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn into_signature(self) -> Signature {
        self.sig
    }

    /// Rule firings that did not cover their spine (only with `check_matches`).
    pub fn match_violations(&self) -> &[String] {
        &self.violations
    }

    fn fuel(&self) -> Fuel {
        let f = Fuel::new(self.options.budget);
        if self.options.check_matches {
            f.with_match_checking()
        } else {
            f
        }
    }

    /// Parse and check a whole file. Returns the names declared, in order.
    pub fn check_source(&mut self, file: &str, src: &str) -> Result<Vec<String>, Diagnostic> {
        let decls = parse_module(file, src)?;
        let mut out = Vec::new();
        for d in &decls {
            out.push(self.check_decl(d)?);
        }
        Ok(out)
    }

    /// Check one declaration and add it to the signature. Returns the name
    /// it was stored under.
    pub fn check_decl(&mut self, d: &SDecl) -> Result<String, Diagnostic> {
        let stored = match d.keyword {
            DeclKeyword::Rewrite => rewrite_decl_name(&d.name),
            _ => d.name.clone(),
        };
        if self.sig.contains(&stored) {
            return Err(Diagnostic::new(
                ErrorCode::Duplicate,
                d.name_span.clone(),
                match d.keyword {
                    DeclKeyword::Rewrite => {
                        format!("`{}` is already registered as a rewrite rule", d.name)
                    }
                    _ => format!("`{}` is already declared", d.name),
                },
            ));
        }
        let fuel = self.fuel();
        let decl = match d.keyword {
            DeclKeyword::Rewrite => self.rewrite_decl(d, &fuel),
            _ => self.typed_decl(d, &fuel),
        };
        // Once the fuel is gone, stuck terms make any later failure
        // meaningless; report the budget instead.
        let decl = decl.map_err(|e| {
            if fuel.exhausted() {
                budget_error(&d.span, self.options.budget)
            } else {
                e
            }
        })?;
        if fuel.exhausted() {
            return Err(budget_error(&d.span, self.options.budget));
        }
        self.violations.extend(fuel.violations());
        self.sig.push(decl);
        Ok(stored)
    }

    fn rewrite_decl(&self, d: &SDecl, fuel: &Fuel) -> Result<Declaration, Diagnostic> {
        let Some(proof) = self.sig.lookup(&d.name) else {
            return Err(Diagnostic::new(
                ErrorCode::UnboundName,
                d.name_span.clone(),
                format!("unbound name `{}`", d.name),
            ));
        };
        if proof.kind == DeclKind::Rewrite {
            return Err(Diagnostic::new(
                ErrorCode::RewriteNotIdentity,
                d.name_span.clone(),
                format!("`{}` is not a proof", d.name),
            ));
        }
        let ev = crate::nbe::Evaluator::new(&self.sig, fuel);
        let rule = compile_rule(&ev, &proof.name, &proof.ty)
            .map_err(|(code, msg)| Diagnostic::new(code, d.name_span.clone(), msg))?;
        Ok(Declaration {
            kind: DeclKind::Rewrite,
            name: name(&rewrite_decl_name(&d.name)),
            ty: proof.ty.clone(),
            body: None,
            rule: Some(Rc::new(rule)),
        })
    }

    fn typed_decl(&self, d: &SDecl, fuel: &Fuel) -> Result<Declaration, Diagnostic> {
        let el = Elab::new(&self.sig, fuel, &d.name, d.span.clone());
        let ctx = Context::new();
        let ty_src = d.ty.as_ref().expect("def and postulate carry a type");
        let binders = flatten_groups(&d.binders);
        let (ty, _) = el.infer_pi(&ctx, &binders, ty_src, true)?;
        el.solve_postponed()?;
        let tyv = el.ev().eval(&Env::new(), &ty);
        let body = match (&d.keyword, &d.body) {
            (DeclKeyword::Def, Some(b)) => {
                let lam = lambda_over_groups(d, b);
                let t = el.check(&ctx, &lam, &tyv)?;
                el.solve_postponed()?;
                Some(t)
            }
            (DeclKeyword::Def, None) => {
                return Err(Diagnostic::new(
                    ErrorCode::Syntax,
                    d.span.clone(),
                    "definition without a body",
                ))
            }
            _ => None,
        };
        if fuel.exhausted() {
            return Err(budget_error(&d.span, self.options.budget));
        }
        let finish = |t: &Term| -> Result<Term, Diagnostic> {
            let z = el.zonk(0, t);
            match el.unsolved_term_meta(&z) {
                Some(m) => Err(el.unsolved_error(m)),
                None => Ok(z),
            }
        };
        let mut ty = finish(&ty)?;
        let mut body = body.as_ref().map(finish).transpose()?;

        if self.options.kernel {
            let k = kernel::Kernel::new(&el);
            k.check_type(&ty)
                .map_err(|m| internal(&d.span, "type", &m))?;
            if let Some(b) = &body {
                let tyv = el.ev().eval(&Env::new(), &ty);
                k.check_closed(b, &tyv)
                    .map_err(|m| internal(&d.span, "body", &m))?;
            }
            el.solve_postponed()?;
            ty = el.zonk(0, &ty);
            body = body.map(|b| el.zonk(0, &b));
        }
        for t in std::iter::once(&ty).chain(body.as_ref()) {
            if let Some(m) = el.unsolved_in(t) {
                return Err(el.unsolved_error(m));
            }
        }
        for t in std::iter::once(&ty).chain(body.as_ref()) {
            if let Some(v) = modal::violations(t).into_iter().next() {
                return Err(Diagnostic::new(ErrorCode::Modal, d.span.clone(), v));
            }
        }
        Ok(Declaration {
            kind: match d.keyword {
                DeclKeyword::Def => DeclKind::Definition,
                _ => DeclKind::Postulate,
            },
            name: name(&d.name),
            ty: Rc::new(ty),
            body: body.map(Rc::new),
            rule: None,
        })
    }

    /// Elaborate a closed term in the current signature, inferring its type.
    /// Returns the term and its type.
    pub fn elaborate_term(&self, file: &str, src: &str) -> Result<(Term, Term), Diagnostic> {
        let st = parse_term(file, src)?;
        let fuel = self.fuel();
        let el = Elab::new(&self.sig, &fuel, "", st.span.clone());
        let ctx = Context::new();
        let over = |e: Diagnostic| {
            if fuel.exhausted() {
                budget_error(&st.span, self.options.budget)
            } else {
                e
            }
        };
        let (t, ty) = el.infer(&ctx, &st).map_err(over)?;
        el.solve_postponed().map_err(over)?;
        let tyt = el.ev().quote(0, &ty);
        let t = el.zonk(0, &t);
        let tyt = el.zonk(0, &tyt);
        for x in [&t, &tyt] {
            if let Some(m) = el.unsolved_in(x) {
                return Err(el.unsolved_error(m));
            }
        }
        if fuel.exhausted() {
            return Err(budget_error(&st.span, self.options.budget));
        }
        Ok((t, tyt))
    }
}

fn budget_error(span: &Span, budget: u64) -> Diagnostic {
    Diagnostic::new(
        ErrorCode::Budget,
        span.clone(),
        format!("rewrite budget of {budget} firings exceeded"),
    )
}

fn internal(span: &Span, what: &str, msg: &str) -> Diagnostic {
    Diagnostic::new(
        ErrorCode::Internal,
        span.clone(),
        format!("kernel re-check of the {what} failed: {msg}"),
    )
}

/// `def f (x : A) {y : B} : T := t` checks `\x {y}. t` against the full type.
fn lambda_over_groups(d: &SDecl, body: &STerm) -> STerm {
    let binders: Vec<LamBinder> = d
        .binders
        .iter()
        .flat_map(|g| {
            g.names.iter().map(move |n| LamBinder {
                name: n.clone(),
                implicit: g.implicit,
                crisp: g.crisp,
            })
        })
        .collect();
    if binders.is_empty() {
        body.clone()
    } else {
        STerm::new(body.span.clone(), SKind::Lam(binders, body.clone()))
    }
}

/// Check a sequence of sources in order into one signature.
pub fn check_sources<'s>(
    files: impl IntoIterator<Item = (&'s str, &'s str)>,
    options: CheckOptions,
) -> Result<Signature, Diagnostic> {
    let mut c = Checker::with_options(options);
    for (file, src) in files {
        c.check_source(file, src)?;
    }
    Ok(c.into_signature())
}

#[cfg(test)]
mod tests;
