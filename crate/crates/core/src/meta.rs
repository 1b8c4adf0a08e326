//! Metavariables for implicit arguments.
//!
//! A term metavariable is closed: it is created with a Pi type over the
//! context it appears in and used applied to that context's variables, so
//! its solution is a closed function. Level metas are bare and solved by
//! levels over the declaration's leading level binders, which every
//! context shares.

use std::cell::RefCell;

use crate::nbe::{Env, Val};
use crate::parser::Span;

#[derive(Clone, Debug)]
pub struct MetaEntry {
    pub depth: usize,
    /// Environment of the context the meta was created in (level metas).
    pub env: Env,
    /// Which context levels the solution may mention.
    pub usable: Vec<bool>,
    pub ty: Val,
    /// The meta stands for a universe level.
    pub level: bool,
    pub solution: Option<Val>,
    pub span: Span,
    /// Name of the implicit binder this meta fills, if any.
    pub origin: Option<String>,
}

#[derive(Debug, Default)]
pub struct MetaStore {
    entries: RefCell<Vec<MetaEntry>>,
}

impl MetaStore {
    pub fn new() -> MetaStore {
        MetaStore::default()
    }

    pub fn fresh(&self, entry: MetaEntry) -> u32 {
        let mut es = self.entries.borrow_mut();
        es.push(entry);
        (es.len() - 1) as u32
    }

    pub fn solution(&self, m: u32) -> Option<Val> {
        self.entries.borrow()[m as usize].solution.clone()
    }

    pub fn is_level(&self, m: u32) -> bool {
        self.entries.borrow()[m as usize].level
    }

    pub fn entry(&self, m: u32) -> MetaEntry {
        self.entries.borrow()[m as usize].clone()
    }

    pub fn solve(&self, m: u32, v: Val) {
        let mut es = self.entries.borrow_mut();
        debug_assert!(es[m as usize].solution.is_none(), "meta solved twice");
        es[m as usize].solution = Some(v);
    }

    pub fn len(&self) -> usize {
        self.entries.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unsolved metas created at or after index `from`.
    pub fn unsolved_since(&self, from: usize) -> Vec<u32> {
        self.entries.borrow()[from..]
            .iter()
            .enumerate()
            .filter(|(_, e)| e.solution.is_none())
            .map(|(i, _)| (from + i) as u32)
            .collect()
    }
}
