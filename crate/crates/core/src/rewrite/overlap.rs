use std::fmt;

use crate::rewrite::{Pattern, RewriteRule};
use crate::signature::Signature;
use crate::syntax::{Name, Term};

/// Two rules whose left-hand sides may match the same spine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub first: Name,
    pub second: Name,
    pub head: Name,
}

impl fmt::Display for Overlap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} \u{22c8} {} @ {}", self.first, self.second, self.head)
    }
}

/// Rough shape of a pattern position, enough to tell rigidly different
/// constructors apart.
enum Shape {
    Any,
    Rigid(String, Vec<Shape>),
    Lam(Box<Shape>),
}

fn term_shape(t: &Term) -> Shape {
    let (head, args) = t.spine();
    let rigid = |s: &str| Shape::Rigid(s.to_string(), Vec::new());
    match head {
        Term::Const(c) => Shape::Rigid(
            c.to_string(),
            args.iter().map(|(a, _)| term_shape(a)).collect(),
        ),
        _ if !args.is_empty() => Shape::Any,
        Term::True => rigid("true"),
        Term::False => rigid("false"),
        Term::Refl => rigid("refl"),
        Term::TT => rigid("tt"),
        Term::Lam(_, b) => Shape::Lam(Box::new(term_shape(b))),
        _ => Shape::Any,
    }
}

fn shape(p: &Pattern) -> Shape {
    match p {
        Pattern::Bind(_) | Pattern::Miller(..) => Shape::Any,
        Pattern::Const(c, ps) => Shape::Rigid(c.to_string(), ps.iter().map(shape).collect()),
        Pattern::Lam(_, b) => Shape::Lam(Box::new(shape(b))),
        Pattern::Check(t) => term_shape(t),
    }
}

fn compatible(a: &Shape, b: &Shape) -> bool {
    match (a, b) {
        (Shape::Any, _) | (_, Shape::Any) => true,
        (Shape::Rigid(c, xs), Shape::Rigid(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| compatible(x, y))
        }
        (Shape::Lam(x), Shape::Lam(y)) => compatible(x, y),
        // a rigid constant may be a function; stay conservative
        _ => true,
    }
}

fn rules_overlap(r: &RewriteRule, s: &RewriteRule) -> bool {
    r.head == s.head
        && r.arity() == s.arity()
        && r.patterns
            .iter()
            .zip(&s.patterns)
            .all(|(p, q)| compatible(&shape(p), &shape(q)))
}

/// Every pair of rules on the same head whose patterns are compatible.
pub fn find_overlaps(sig: &Signature) -> Vec<Overlap> {
    let rules = sig.rules();
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        for s in &rules[i + 1..] {
            if rules_overlap(r, s) {
                out.push(Overlap {
                    first: r.name.clone(),
                    second: s.name.clone(),
                    head: r.head.clone(),
                });
            }
        }
    }
    out
}
