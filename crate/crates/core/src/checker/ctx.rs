use crate::nbe::{Env, Val, Value};

/// Typing context: one entry per bound variable, innermost last.
///
/// `crisp` records how a variable was bound; `usable` is cleared for
/// non-crisp entries when elaboration enters a crisp position.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub names: Vec<String>,
    pub types: Vec<Val>,
    pub crisp: Vec<bool>,
    pub usable: Vec<bool>,
    pub env: Env,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn depth(&self) -> usize {
        self.names.len()
    }

    /// Extend with a fresh variable of type `ty`.
    pub fn bind(&self, name: &str, ty: Val, crisp: bool) -> Context {
        let v = Value::fresh_for(&ty, self.depth());
        self.define(name, ty, crisp, v)
    }

    fn define(&self, name: &str, ty: Val, crisp: bool, v: Val) -> Context {
        let mut c = self.clone();
        c.names.push(name.to_string());
        c.types.push(ty);
        c.crisp.push(crisp);
        c.usable.push(true);
        c.env = c.env.extend(v);
        c
    }

    /// The context seen from a crisp position: only crisp entries remain usable.
    pub fn mask(&self) -> Context {
        let mut c = self.clone();
        for (u, &cr) in c.usable.iter_mut().zip(&self.crisp) {
            *u = *u && cr;
        }
        c
    }

    /// Innermost entry named `x`, as (de Bruijn level, index).
    pub fn lookup(&self, x: &str) -> Option<(usize, usize)> {
        let n = self.depth();
        self.names
            .iter()
            .rposition(|y| y == x)
            .map(|lvl| (lvl, n - 1 - lvl))
    }

    pub fn name_refs(&self) -> Vec<&str> {
        self.names.iter().map(String::as_str).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::rc::Rc;

    #[test]
    fn mask_hides_non_crisp_entries() {
        let c = Context::new().bind("A", Rc::new(Value::Bool), true).bind(
            "x",
            Rc::new(Value::Bool),
            false,
        );
        let m = c.mask();
        assert_eq!(m.usable, vec![true, false]);
    }

    #[test]
    fn mask_of_crisp_context_is_identity() {
        let c = Context::new().bind("A", Rc::new(Value::Bool), true);
        assert_eq!(c.mask().usable, c.usable);
    }

    #[test]
    fn lookup_finds_innermost() {
        let c = Context::new().bind("x", Rc::new(Value::Bool), false).bind(
            "x",
            Rc::new(Value::Unit),
            false,
        );
        assert_eq!(c.lookup("x"), Some((1, 0)));
    }
}
