//! Compiling the left-hand side of a rewrite rule into a pattern.
//!
//! Each pattern variable gets one binding site: its first occurrence in an
//! explicit position, or failing that its first occurrence in an implicit
//! one. Every other subterm that contains no binding site is kept as a
//! check, compared by conversion once all variables are bound. Implicit
//! arguments are usually forced by the explicit ones, so this is how
//! repeated variables in `{a} {a}` positions are accepted. A variable may
//! also repeat in explicit positions as long as every explicit occurrence
//! is a bare variable outside any binder (as in `g1fst i (g1pair i a b)`);
//! higher-order repeats are rejected as nonlinear.

use std::collections::HashSet;
use std::rc::Rc;

use crate::error::ErrorCode;
use crate::syntax::{Name, Plicity, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Bind pattern variable `k` (numbered outermost first).
    Bind(usize),
    /// Pattern variable applied to distinct bound variables, given as local
    /// de Bruijn levels (0 = outermost lambda inside the pattern).
    Miller(usize, Vec<usize>),
    /// Constant applied to exactly these arguments.
    Const(Name, Vec<Pattern>),
    Lam(Plicity, Box<Pattern>),
    /// Compare with this term by conversion. The term lives in the context
    /// of the pattern variables followed by the enclosing local binders.
    Check(Rc<Term>),
}

impl Pattern {
    pub fn binds(&self) -> bool {
        match self {
            Pattern::Bind(_) | Pattern::Miller(..) => true,
            Pattern::Const(_, ps) => ps.iter().any(Pattern::binds),
            Pattern::Lam(_, p) => p.binds(),
            Pattern::Check(_) => false,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Occurrence {
    pvar: usize,
    explicit: bool,
    /// A bare variable outside any local binder.
    first_order: bool,
}

/// Pattern variable referenced by `Var(i)` at local depth `m`.
fn pvar_of(i: usize, m: usize, k: usize) -> Option<usize> {
    (i >= m).then(|| k - 1 - (i - m))
}

/// Local arguments of a Miller application, as local levels.
fn miller_args(args: &[(&Term, Plicity)], m: usize) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for (a, _) in args {
        match a {
            Term::Var(j) if *j < m => {
                let lvl = m - 1 - j;
                if out.contains(&lvl) {
                    return None;
                }
                out.push(lvl);
            }
            _ => return None,
        }
    }
    Some(out)
}

/// Walks a normalized left-hand side, reporting bindable occurrences in a
/// fixed order shared by analysis and compilation.
struct Walker {
    k: usize,
}

impl Walker {
    fn walk(&self, t: &Term, m: usize, explicit: bool, out: &mut Vec<Occurrence>) {
        match t {
            Term::Var(i) => {
                if let Some(p) = pvar_of(*i, m, self.k) {
                    out.push(Occurrence {
                        pvar: p,
                        explicit,
                        first_order: m == 0,
                    });
                }
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                match head {
                    Term::Var(i) if pvar_of(*i, m, self.k).is_some() => {
                        if miller_args(&args, m).is_some() {
                            out.push(Occurrence {
                                pvar: pvar_of(*i, m, self.k).unwrap(),
                                explicit,
                                first_order: false,
                            });
                        }
                    }
                    Term::Const(_) => {
                        for (a, p) in args {
                            self.walk(a, m, explicit && !p.is_implicit(), out);
                        }
                    }
                    _ => {}
                }
            }
            Term::Lam(_, b) => self.walk(b, m + 1, explicit, out),
            _ => {}
        }
    }

    fn count(&self, t: &Term, m: usize) -> usize {
        let mut v = Vec::new();
        self.walk(t, m, true, &mut v);
        v.len()
    }
}

pub struct Compiled {
    pub patterns: Vec<Pattern>,
    /// Which pattern variables have a binding site.
    pub bound: Vec<bool>,
}

type CompileError = (ErrorCode, String);

/// Compile normalized arguments (each at depth `k`) into patterns.
pub fn compile_args(
    args: &[(Term, Plicity)],
    k: usize,
    var_names: &[Name],
) -> Result<Compiled, CompileError> {
    let w = Walker { k };
    let mut occs = Vec::new();
    for (a, p) in args {
        w.walk(a, 0, !p.is_implicit(), &mut occs);
    }

    for pv in 0..k {
        let explicit: Vec<&Occurrence> =
            occs.iter().filter(|o| o.pvar == pv && o.explicit).collect();
        if explicit.len() > 1 && explicit.iter().any(|o| !o.first_order) {
            return Err((
                ErrorCode::RewriteNonlinear,
                format!(
                    "pattern variable `{}` occurs more than once in an explicit position, once under a binder",
                    var_names[pv]
                ),
            ));
        }
    }

    let mut sites = HashSet::new();
    let mut bound = vec![false; k];
    for pv in 0..k {
        let pick = occs
            .iter()
            .position(|o| o.pvar == pv && o.explicit)
            .or_else(|| occs.iter().position(|o| o.pvar == pv));
        if let Some(i) = pick {
            sites.insert(i);
            bound[pv] = true;
        }
    }

    let mut c = Compiler {
        w,
        sites,
        next: 0,
        bound: &bound,
        var_names,
    };
    let mut patterns = Vec::new();
    for (a, _) in args {
        patterns.push(c.compile(a, 0)?);
    }
    Ok(Compiled { patterns, bound })
}

struct Compiler<'a> {
    w: Walker,
    sites: HashSet<usize>,
    next: usize,
    bound: &'a [bool],
    var_names: &'a [Name],
}

impl Compiler<'_> {
    fn check(&self, t: &Term, m: usize) -> Result<Pattern, CompileError> {
        for i in t.free_vars() {
            if let Some(p) = pvar_of(i, m, self.w.k) {
                if !self.bound[p] {
                    return Err((
                        ErrorCode::RewriteUnsupportedPattern,
                        format!(
                            "pattern variable `{}` only occurs where it cannot be bound",
                            self.var_names[p]
                        ),
                    ));
                }
            }
        }
        Ok(Pattern::Check(Rc::new(t.clone())))
    }

    fn compile(&mut self, t: &Term, m: usize) -> Result<Pattern, CompileError> {
        let n = self.w.count(t, m);
        let range = self.next..self.next + n;
        if !range.clone().any(|i| self.sites.contains(&i)) {
            self.next += n;
            return self.check(t, m);
        }
        match t {
            Term::Var(i) => {
                self.next += 1;
                Ok(Pattern::Bind(pvar_of(*i, m, self.w.k).unwrap()))
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                match head {
                    Term::Var(i) => {
                        self.next += 1;
                        let p = pvar_of(*i, m, self.w.k).unwrap();
                        Ok(Pattern::Miller(p, miller_args(&args, m).unwrap()))
                    }
                    Term::Const(c) => {
                        let mut ps = Vec::new();
                        for (a, _) in args {
                            ps.push(self.compile(a, m)?);
                        }
                        Ok(Pattern::Const(c.clone(), ps))
                    }
                    _ => unreachable!("walker only descends into constant spines"),
                }
            }
            Term::Lam(b, body) => Ok(Pattern::Lam(
                b.plicity,
                Box::new(self.compile(body, m + 1)?),
            )),
            _ => unreachable!("walker found a binding site in an unsupported shape"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    fn names(k: usize) -> Vec<Name> {
        (0..k).map(|i| name(&format!("x{i}"))).collect()
    }

    #[test]
    fn explicit_site_preferred() {
        // f {x0} x0 with one pattern variable
        let args = vec![
            (Term::Var(0), Plicity::Implicit),
            (Term::Var(0), Plicity::Explicit),
        ];
        let c = compile_args(&args, 1, &names(1)).unwrap();
        assert_eq!(c.patterns[0], Pattern::Check(Rc::new(Term::Var(0))));
        assert_eq!(c.patterns[1], Pattern::Bind(0));
    }

    #[test]
    fn implicit_repeats_accepted() {
        let args = vec![
            (Term::Var(0), Plicity::Implicit),
            (Term::Var(0), Plicity::Implicit),
        ];
        let c = compile_args(&args, 1, &names(1)).unwrap();
        assert_eq!(c.patterns[0], Pattern::Bind(0));
        assert!(matches!(c.patterns[1], Pattern::Check(_)));
    }

    #[test]
    fn first_order_explicit_repeat_becomes_check() {
        let args = vec![
            (Term::Var(0), Plicity::Explicit),
            (Term::Var(0), Plicity::Explicit),
        ];
        let c = compile_args(&args, 1, &names(1)).unwrap();
        assert_eq!(c.patterns[0], Pattern::Bind(0));
        assert!(matches!(c.patterns[1], Pattern::Check(_)));
    }

    #[test]
    fn higher_order_explicit_repeat_rejected() {
        // x0 and \y. x0 y
        let body = Term::App(
            Rc::new(Term::Var(1)),
            Rc::new(Term::Var(0)),
            Plicity::Explicit,
        );
        let args = vec![
            (Term::Var(0), Plicity::Explicit),
            (Term::lam("y", body), Plicity::Explicit),
        ];
        let e = compile_args(&args, 1, &names(1)).err().unwrap();
        assert_eq!(e.0, ErrorCode::RewriteNonlinear);
    }

    #[test]
    fn miller_under_lambda() {
        // \y. x0 y
        let body = Term::App(
            Rc::new(Term::Var(1)),
            Rc::new(Term::Var(0)),
            Plicity::Explicit,
        );
        let args = vec![(Term::lam("y", body), Plicity::Explicit)];
        let c = compile_args(&args, 1, &names(1)).unwrap();
        assert_eq!(
            c.patterns[0],
            Pattern::Lam(Plicity::Explicit, Box::new(Pattern::Miller(0, vec![0])))
        );
    }

    #[test]
    fn variable_under_pair_is_unsupported() {
        let args = vec![(
            Term::Pair(Rc::new(Term::Var(0)), Rc::new(Term::TT)),
            Plicity::Explicit,
        )];
        let e = compile_args(&args, 1, &names(1)).err().unwrap();
        assert_eq!(e.0, ErrorCode::RewriteUnsupportedPattern);
    }
}
