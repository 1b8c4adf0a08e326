use std::collections::HashMap;
use std::rc::Rc;

use crate::rewrite::RewriteRule;
use crate::syntax::{lambda_arity, Name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Definition,
    Postulate,
    Rewrite,
}

/// Rewrite declarations are stored under `rewrite <proof>`, which cannot
/// clash with a user identifier.
pub fn rewrite_decl_name(proof: &str) -> String {
    format!("rewrite {proof}")
}

#[derive(Clone, Debug)]
pub struct Declaration {
    pub kind: DeclKind,
    pub name: Name,
    /// Closed type. For a rewrite declaration, the type of the proof it names.
    pub ty: Rc<Term>,
    pub body: Option<Rc<Term>>,
    pub rule: Option<Rc<RewriteRule>>,
}

impl Declaration {
    /// Lambdas in the body; a definition that heads a rewrite rule only
    /// unfolds once it has been applied to this many arguments.
    pub fn arity(&self) -> usize {
        self.body.as_deref().map_or(0, lambda_arity)
    }
}

/// Checked declarations plus the ordered rewrite-rule set.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    decls: Vec<Declaration>,
    index: HashMap<Name, usize>,
    rules: Vec<Rc<RewriteRule>>,
    by_head: HashMap<Name, Vec<usize>>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&Declaration> {
        self.index.get(name).map(|&i| &self.decls[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.decls
    }

    pub fn rules(&self) -> &[Rc<RewriteRule>] {
        &self.rules
    }

    /// Rules whose left-hand side is headed by `head`, in registration order.
    pub fn rules_for(&self, head: &str) -> impl Iterator<Item = &RewriteRule> + '_ {
        self.by_head
            .get(head)
            .into_iter()
            .flatten()
            .map(move |&i| self.rules[i].as_ref())
    }

    pub fn has_rules_for(&self, head: &str) -> bool {
        self.by_head.contains_key(head)
    }

    /// Append a declaration. Panics on a duplicate name; callers check first.
    pub fn push(&mut self, decl: Declaration) {
        assert!(
            !self.index.contains_key(&decl.name),
            "duplicate declaration {}",
            decl.name
        );
        if let Some(rule) = &decl.rule {
            let idx = self.rules.len();
            self.rules.push(rule.clone());
            self.by_head.entry(rule.head.clone()).or_default().push(idx);
        }
        self.index.insert(decl.name.clone(), self.decls.len());
        self.decls.push(decl);
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// A copy without the named rewrite declarations.
    pub fn without_rules(&self, names: &[&str]) -> Signature {
        let mut out = Signature::new();
        for d in &self.decls {
            if let Some(rule) = &d.rule {
                if names.contains(&rule.name.as_ref()) {
                    continue;
                }
            }
            out.push(d.clone());
        }
        out
    }
}
