//! Normalization by evaluation.
//!
//! Terms evaluate to [`Value`]s in an environment indexed by de Bruijn
//! level; neutral values carry a head and a spine of eliminations. User
//! rewrite rules are tried whenever a constant-headed spine of applications
//! is extended, so every value handed out is already rewritten.

mod conv;
mod eval;
mod readback;
mod value;

pub use conv::{convertible, Conv, Solver};
pub use eval::{Evaluator, Fuel, DEFAULT_BUDGET};
pub use readback::quote_level;
pub use value::{Closure, Elim, Env, Head, Sort, Val, Value};

use crate::signature::Signature;
use crate::syntax::Term;

/// The rewrite budget ran out before a normal form was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub budget: u64,
}

/// Normal form of a closed, well-typed term.
pub fn normalize(sig: &Signature, t: &Term, budget: u64) -> Result<Term, BudgetExceeded> {
    let fuel = Fuel::new(budget);
    let nf = Evaluator::new(sig, &fuel).normal_form(t);
    if fuel.exhausted() {
        Err(BudgetExceeded { budget })
    } else {
        Ok(nf)
    }
}
