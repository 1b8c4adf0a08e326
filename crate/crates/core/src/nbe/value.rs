use std::rc::Rc;

use crate::level::Level;
use crate::syntax::{Binder, Name, Plicity, Term};

pub type Val = Rc<Value>;

/// Values indexed by de Bruijn level.
#[derive(Clone, Debug, Default)]
pub struct Env(Rc<Vec<Val>>);

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn from_vec(v: Vec<Val>) -> Env {
        Env(Rc::new(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extend(&self, v: Val) -> Env {
        let mut vs = (*self.0).clone();
        vs.push(v);
        Env(Rc::new(vs))
    }

    pub fn extend_many(&self, more: impl IntoIterator<Item = Val>) -> Env {
        let mut vs = (*self.0).clone();
        vs.extend(more);
        Env(Rc::new(vs))
    }

    /// Look up a de Bruijn index.
    pub fn index(&self, i: usize) -> &Val {
        let n = self.0.len();
        assert!(
            i < n,
            "variable index {i} out of range for environment of {n}"
        );
        &self.0[n - 1 - i]
    }

    pub fn values(&self) -> &[Val] {
        &self.0
    }
}

/// A term under binders, paired with the environment it was built in.
#[derive(Clone, Debug)]
pub struct Closure {
    pub env: Env,
    pub body: Rc<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sort {
    Set(Level),
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Head {
    /// De Bruijn level.
    Var(usize),
    Const(Name),
    Meta(u32),
}

#[derive(Clone, Debug)]
pub enum Elim {
    App(Val, Plicity),
    Fst,
    Snd,
    J {
        motive: Closure,
        base: Val,
    },
    BoolElim {
        motive: Closure,
        crisp: bool,
        t_case: Val,
        f_case: Val,
    },
    FlatElim {
        motive: Closure,
        body: Closure,
    },
    Absurd(Val),
}

impl Elim {
    pub fn as_app(&self) -> Option<&Val> {
        match self {
            Elim::App(v, _) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Universe(Sort),
    LevelType,
    Level(Level),
    Pi(Binder, Val, Closure),
    Lam(Binder, Closure),
    Sigma(Name, Val, Closure),
    Pair(Val, Val),
    IdType(Val, Val, Val),
    Refl,
    Unit,
    TT,
    Empty,
    Bool,
    True,
    False,
    Flat(Val),
    FlatCon(Val),
    Neutral(Head, Rc<Vec<Elim>>),
}

impl Value {
    pub fn var(level: usize) -> Val {
        Rc::new(Value::Neutral(Head::Var(level), Rc::new(Vec::new())))
    }

    pub fn level_var(level: usize) -> Val {
        Rc::new(Value::Level(Level::var(level)))
    }

    /// A fresh variable suitable for a binder whose domain is `dom`.
    pub fn fresh_for(dom: &Value, level: usize) -> Val {
        match dom {
            Value::LevelType => Value::level_var(level),
            _ => Value::var(level),
        }
    }

    pub fn constant(name: Name) -> Val {
        Rc::new(Value::Neutral(Head::Const(name), Rc::new(Vec::new())))
    }

    pub fn meta(m: u32) -> Val {
        Rc::new(Value::Neutral(Head::Meta(m), Rc::new(Vec::new())))
    }

    pub fn set(level: Level) -> Val {
        Rc::new(Value::Universe(Sort::Set(level)))
    }

    pub fn as_neutral(&self) -> Option<(&Head, &[Elim])> {
        match self {
            Value::Neutral(h, sp) => Some((h, sp)),
            _ => None,
        }
    }

    /// Head constant and arguments, if this is a constant applied only to arguments.
    pub fn as_const_app(&self) -> Option<(&Name, Vec<&Val>)> {
        match self {
            Value::Neutral(Head::Const(c), sp) => {
                let args: Option<Vec<&Val>> = sp.iter().map(Elim::as_app).collect();
                args.map(|a| (c, a))
            }
            _ => None,
        }
    }
}
