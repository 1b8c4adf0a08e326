//! Surface pretty-printer. Output re-parses to the same tree.

use crate::parser::ast::{Arg, DeclKeyword, Group, LamBinder, SDecl, SKind, STerm};

// Precedence levels, loosest first.
const TERM: u8 = 0;
const PROD: u8 = 1;
const EQ: u8 = 2;
const LUB: u8 = 3;
const APP: u8 = 4;
const ATOM: u8 = 5;

fn level(k: &SKind) -> u8 {
    match k {
        SKind::Lam(..)
        | SKind::LetCon { .. }
        | SKind::Pi(..)
        | SKind::Arrow(..)
        | SKind::Sigma(..) => TERM,
        SKind::Prod(..) => PROD,
        SKind::Eq(..) => EQ,
        SKind::Lub(..) => LUB,
        SKind::App(..)
        | SKind::Set(_)
        | SKind::LSuc(_)
        | SKind::Flat(_)
        | SKind::Con(_)
        | SKind::Fst(_)
        | SKind::Snd(_)
        | SKind::Absurd(..)
        | SKind::Id(..)
        | SKind::IdElim(..)
        | SKind::BoolElim(..) => APP,
        _ => ATOM,
    }
}

fn group(g: &Group, out: &mut String) {
    out.push(if g.implicit { '{' } else { '(' });
    if g.crisp {
        out.push_str("@flat ");
    }
    out.push_str(&g.names.join(" "));
    out.push_str(" : ");
    go(&g.ty, TERM, out);
    out.push(if g.implicit { '}' } else { ')' });
}

fn lam_binder(b: &LamBinder, out: &mut String) {
    match (b.implicit, b.crisp) {
        (false, false) => out.push_str(&b.name),
        (true, false) => {
            out.push('{');
            out.push_str(&b.name);
            out.push('}');
        }
        (false, true) => {
            out.push_str("(@flat ");
            out.push_str(&b.name);
            out.push(')');
        }
        (true, true) => {
            out.push_str("{@flat ");
            out.push_str(&b.name);
            out.push('}');
        }
    }
}

fn keyword(kw: &str, args: &[&STerm], out: &mut String) {
    out.push_str(kw);
    for a in args {
        out.push(' ');
        go(a, ATOM, out);
    }
}

fn go(t: &STerm, prec: u8, out: &mut String) {
    let k = &*t.kind;
    let parens = level(k) < prec;
    if parens {
        out.push('(');
    }
    match k {
        SKind::Var(x) => out.push_str(x),
        SKind::Hole => out.push('_'),
        SKind::Set(l) => keyword("Set", &[l], out),
        SKind::SetOmega => out.push_str("SetOmega"),
        SKind::Level => out.push_str("Level"),
        SKind::LZero => out.push_str("lzero"),
        SKind::LSuc(l) => keyword("lsuc", &[l], out),
        SKind::Lub(a, b) => {
            go(a, LUB, out);
            out.push_str(" \\/ ");
            go(b, APP, out);
        }
        SKind::Pi(gs, cod) => {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                group(g, out);
            }
            out.push_str(" -> ");
            go(cod, TERM, out);
        }
        SKind::Arrow(a, b) => {
            go(a, PROD, out);
            out.push_str(" -> ");
            go(b, TERM, out);
        }
        SKind::Sigma(x, a, b) => {
            out.push('(');
            out.push_str(x);
            out.push_str(" : ");
            go(a, TERM, out);
            out.push_str(") * ");
            go(b, PROD, out);
        }
        SKind::Prod(a, b) => {
            go(a, EQ, out);
            out.push_str(" * ");
            go(b, PROD, out);
        }
        SKind::Lam(bs, body) => {
            out.push('\\');
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                lam_binder(b, out);
            }
            out.push_str(". ");
            go(body, TERM, out);
        }
        SKind::App(f, a) => {
            go(f, APP, out);
            out.push(' ');
            match a {
                Arg::Explicit(a) => go(a, ATOM, out),
                Arg::Implicit(a) => {
                    out.push('{');
                    go(a, TERM, out);
                    out.push('}');
                }
                Arg::Named(x, a) => {
                    out.push('{');
                    out.push_str(x);
                    out.push_str(" := ");
                    go(a, TERM, out);
                    out.push('}');
                }
            }
        }
        SKind::Pair(a, b) => {
            out.push('(');
            go(a, TERM, out);
            out.push_str(", ");
            go(b, TERM, out);
            out.push(')');
        }
        SKind::Fst(p) => keyword("fst", &[p], out),
        SKind::Snd(p) => keyword("snd", &[p], out),
        SKind::Eq(a, b, ty) => {
            go(a, LUB, out);
            out.push_str(" = ");
            go(b, LUB, out);
            if let Some(ty) = ty {
                out.push_str(" : ");
                go(ty, LUB, out);
            }
        }
        SKind::Id(a, x, y) => keyword("Id", &[a, x, y], out),
        SKind::Refl => out.push_str("refl"),
        SKind::IdElim(m, d, p) => keyword("idElim", &[m, d, p], out),
        SKind::Unit => out.push_str("Unit"),
        SKind::TT => out.push_str("tt"),
        SKind::Empty => out.push_str("Empty"),
        SKind::Absurd(m, e) => keyword("absurd", &[m, e], out),
        SKind::Bool => out.push_str("Bool"),
        SKind::True => out.push_str("true"),
        SKind::False => out.push_str("false"),
        SKind::BoolElim(m, t, f, b) => keyword("boolElim", &[m, t, f, b], out),
        SKind::Flat(a) => keyword("Flat", &[a], out),
        SKind::Con(a) => keyword("con", &[a], out),
        SKind::LetCon {
            name,
            scrutinee,
            motive,
            body,
        } => {
            out.push_str("let con ");
            out.push_str(name);
            out.push_str(" = ");
            go(scrutinee, TERM, out);
            if let Some(m) = motive {
                out.push_str(" return ");
                go(m, TERM, out);
            }
            out.push_str(" in ");
            go(body, TERM, out);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print_term(t: &STerm) -> String {
    let mut out = String::new();
    go(t, TERM, &mut out);
    out
}

pub fn print_decl(d: &SDecl) -> String {
    let mut out = String::new();
    out.push_str(match d.keyword {
        DeclKeyword::Def => "def ",
        DeclKeyword::Postulate => "postulate ",
        DeclKeyword::Rewrite => "rewrite ",
    });
    out.push_str(&d.name);
    for g in &d.binders {
        out.push(' ');
        group(g, &mut out);
    }
    if let Some(ty) = &d.ty {
        out.push_str(" : ");
        go(ty, TERM, &mut out);
    }
    if let Some(b) = &d.body {
        out.push_str(" := ");
        go(b, TERM, &mut out);
    }
    out
}

pub fn print_module(ds: &[SDecl]) -> String {
    let mut out = String::new();
    for d in ds {
        out.push_str(&print_decl(d));
        out.push('\n');
    }
    out
}
