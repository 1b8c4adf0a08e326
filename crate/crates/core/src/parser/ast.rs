//! Surface syntax: named variables, sugar intact, every node located.

use crate::parser::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STerm {
    pub span: Span,
    pub kind: Box<SKind>,
}

/// A binder group such as `(x y : A)`, `{A : Set l}` or `(@flat x : A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub names: Vec<String>,
    pub ty: STerm,
    pub implicit: bool,
    pub crisp: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LamBinder {
    /// `_` for an unused binder.
    pub name: String,
    pub implicit: bool,
    pub crisp: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Explicit(STerm),
    /// `{t}`: the next implicit argument.
    Implicit(STerm),
    /// `{x := t}`.
    Named(String, STerm),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SKind {
    Var(String),
    Hole,
    Set(STerm),
    SetOmega,
    Level,
    LZero,
    LSuc(STerm),
    Lub(STerm, STerm),
    Pi(Vec<Group>, STerm),
    Arrow(STerm, STerm),
    Sigma(String, STerm, STerm),
    Prod(STerm, STerm),
    Lam(Vec<LamBinder>, STerm),
    App(STerm, Arg),
    Pair(STerm, STerm),
    Fst(STerm),
    Snd(STerm),
    /// `a = b` or `a = b : A`.
    Eq(STerm, STerm, Option<STerm>),
    Id(STerm, STerm, STerm),
    Refl,
    IdElim(STerm, STerm, STerm),
    Unit,
    TT,
    Empty,
    Absurd(STerm, STerm),
    Bool,
    True,
    False,
    BoolElim(STerm, STerm, STerm, STerm),
    Flat(STerm),
    Con(STerm),
    LetCon {
        name: String,
        scrutinee: STerm,
        motive: Option<STerm>,
        body: STerm,
    },
}

impl STerm {
    pub fn new(span: Span, kind: SKind) -> STerm {
        STerm {
            span,
            kind: Box::new(kind),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKeyword {
    Def,
    Postulate,
    Rewrite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SDecl {
    pub keyword: DeclKeyword,
    pub span: Span,
    pub name: String,
    pub name_span: Span,
    pub binders: Vec<Group>,
    /// Absent only for `rewrite`.
    pub ty: Option<STerm>,
    pub body: Option<STerm>,
}
