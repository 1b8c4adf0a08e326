//! User-declared rewrite rules.
//!
//! A rule is compiled from the type of a proof `p : (xs : Δ) -> f us = v`.
//! Its left-hand side must be a constant applied to arguments; those
//! arguments are normalized and turned into [`Pattern`]s. Rules are tried in
//! registration order each time the evaluator extends a spine of
//! applications headed by `f`; the first match wins.

mod matching;
mod overlap;
mod pattern;

use std::fmt;
use std::rc::Rc;

pub use overlap::{find_overlaps, Overlap};
pub use pattern::Pattern;

use crate::error::ErrorCode;
use crate::nbe::{Elim, Env, Evaluator, Val, Value};
use crate::signature::DeclKind;
use crate::syntax::{pi_telescope, Name, Plicity, Term};

#[derive(Clone, Debug)]
pub struct RewriteRule {
    /// The proof the rule was declared from.
    pub name: Name,
    pub head: Name,
    /// Pattern variables, outermost first.
    pub var_names: Vec<Name>,
    /// Normalized left-hand side arguments, over the pattern variables.
    pub args: Vec<(Term, Plicity)>,
    pub patterns: Vec<Pattern>,
    /// Right-hand side, over the pattern variables.
    pub rhs: Rc<Term>,
}

impl RewriteRule {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// The left-hand side as a term over the pattern variables.
    pub fn lhs(&self) -> Term {
        self.args
            .iter()
            .fold(Term::Const(self.head.clone()), |f, (a, p)| {
                Term::App(Rc::new(f), Rc::new(a.clone()), *p)
            })
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.var_names.iter().map(|n| n.as_ref()).collect();
        write!(
            f,
            "{} --> {}",
            crate::pretty::print_in(&names, &self.lhs()),
            crate::pretty::print_in(&names, &self.rhs)
        )
    }
}

pub type RuleError = (ErrorCode, String);

/// Turn the type of a proof into a rule. `ev` sees the signature the rule
/// will be added to.
pub fn compile_rule(ev: &Evaluator<'_>, proof: &Name, ty: &Term) -> Result<RewriteRule, RuleError> {
    let (tele, body) = pi_telescope(ty);
    let Term::IdType(_, lhs, rhs) = body else {
        return Err((
            ErrorCode::RewriteNotIdentity,
            format!("the type of `{proof}` does not end in an identity type"),
        ));
    };
    let (head, args) = lhs.spine();
    let head = match head {
        Term::Const(c) => match ev.sig.lookup(c).map(|d| d.kind) {
            Some(DeclKind::Definition | DeclKind::Postulate) => c.clone(),
            _ => {
                return Err((
                    ErrorCode::RewriteBadHead,
                    format!("`{c}` cannot head a rewrite rule"),
                ))
            }
        },
        _ => {
            return Err((
                ErrorCode::RewriteBadHead,
                "the left-hand side must be a postulate or definition applied to arguments"
                    .to_string(),
            ))
        }
    };

    let mut vals: Vec<Val> = Vec::new();
    for (_, dom) in &tele {
        let d = ev.eval(&Env::from_vec(vals.clone()), dom);
        vals.push(Value::fresh_for(&ev.force(&d), vals.len()));
    }
    let env = Env::from_vec(vals);
    let k = tele.len();
    let var_names: Vec<Name> = tele.iter().map(|(b, _)| b.name.clone()).collect();
    let nargs: Vec<(Term, Plicity)> = args
        .iter()
        .map(|(a, p)| (ev.quote(k, &ev.eval(&env, a)), *p))
        .collect();

    let compiled = pattern::compile_args(&nargs, k, &var_names)?;
    for i in rhs.free_vars() {
        let p = k - 1 - i;
        if !compiled.bound[p] {
            return Err((
                ErrorCode::RewriteUnboundRhs,
                format!(
                    "right-hand side uses `{}`, which the left-hand side does not bind",
                    var_names[p]
                ),
            ));
        }
    }
    Ok(RewriteRule {
        name: proof.clone(),
        head,
        var_names,
        args: nargs,
        patterns: compiled.patterns,
        rhs: rhs.clone(),
    })
}

/// Try the rules for `head` against an application spine.
pub fn rewrite_head(ev: &Evaluator<'_>, head: &Name, spine: &[Elim]) -> Option<Val> {
    if !ev.sig.has_rules_for(head) || ev.fuel.exhausted() {
        return None;
    }
    let args: Vec<Val> = spine
        .iter()
        .map(|e| {
            e.as_app()
                .expect("rewriting a non-application spine")
                .clone()
        })
        .collect();
    for rule in ev.sig.rules_for(head) {
        if rule.arity() != args.len() {
            continue;
        }
        if let Some(vals) = matching::match_rule(ev, rule, &args) {
            if !ev.fuel.take() {
                return None;
            }
            if ev.fuel.checking_matches() && !matching::verify_match(ev, rule, &args, &vals) {
                ev.fuel.record_violation(format!(
                    "rule `{}` matched a spine it does not cover",
                    rule.name
                ));
            }
            return Some(ev.eval(&Env::from_vec(vals), &rule.rhs));
        }
    }
    None
}
