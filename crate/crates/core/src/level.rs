//! Universe levels in max-plus normal form.
//!
//! A level is `max(c, x₁ + k₁, …, xₙ + kₙ)` where each `xᵢ` is a level
//! variable (a de Bruijn level of a context entry of type `Level`) or an
//! unsolved level metavariable. The representation is canonical: every
//! atom occurs once with its largest offset, and the constant is reset to
//! zero whenever some atom already dominates it.

use std::collections::BTreeMap;
use std::fmt;

/// Something a level can be built from besides constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelAtom {
    /// A bound level variable, by de Bruijn level.
    Var(usize),
    /// An elaboration metavariable of type `Level`.
    Meta(u32),
}

/// Level expressions as written, before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelExpr {
    Zero,
    Atom(LevelAtom),
    Suc(Box<LevelExpr>),
    Max(Box<LevelExpr>, Box<LevelExpr>),
}

impl LevelExpr {
    pub fn suc(e: LevelExpr) -> LevelExpr {
        LevelExpr::Suc(Box::new(e))
    }

    pub fn max(a: LevelExpr, b: LevelExpr) -> LevelExpr {
        LevelExpr::Max(Box::new(a), Box::new(b))
    }

    pub fn var(v: usize) -> LevelExpr {
        LevelExpr::Atom(LevelAtom::Var(v))
    }

    /// Value under a valuation of atoms into naturals.
    pub fn eval_with(&self, val: &dyn Fn(LevelAtom) -> u64) -> u64 {
        match self {
            LevelExpr::Zero => 0,
            LevelExpr::Atom(a) => val(*a),
            LevelExpr::Suc(e) => e.eval_with(val) + 1,
            LevelExpr::Max(a, b) => a.eval_with(val).max(b.eval_with(val)),
        }
    }
}

/// Canonical max-plus normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Level {
    constant: u32,
    atoms: BTreeMap<LevelAtom, u32>,
}

impl Level {
    pub fn zero() -> Level {
        Level::default()
    }

    pub fn constant(n: u32) -> Level {
        Level {
            constant: n,
            atoms: BTreeMap::new(),
        }
    }

    pub fn atom(a: LevelAtom) -> Level {
        let mut atoms = BTreeMap::new();
        atoms.insert(a, 0);
        Level { constant: 0, atoms }
    }

    pub fn var(v: usize) -> Level {
        Level::atom(LevelAtom::Var(v))
    }

    pub fn meta(m: u32) -> Level {
        Level::atom(LevelAtom::Meta(m))
    }

    pub fn constant_part(&self) -> u32 {
        self.constant
    }

    pub fn atoms(&self) -> impl Iterator<Item = (LevelAtom, u32)> + '_ {
        self.atoms.iter().map(|(a, k)| (*a, *k))
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.atoms.is_empty()
    }

    fn normalized(mut self) -> Level {
        let max_off = self.atoms.values().copied().max();
        if let Some(m) = max_off {
            if self.constant <= m {
                self.constant = 0;
            }
        }
        self
    }

    pub fn suc(&self) -> Level {
        self.plus(1)
    }

    pub fn plus(&self, k: u32) -> Level {
        let atoms = self.atoms.iter().map(|(a, o)| (*a, o + k)).collect();
        // max(c, …) + k keeps the constant only if it was meaningful
        let constant = if self.atoms.is_empty() || self.constant > 0 {
            self.constant + k
        } else {
            0
        };
        Level { constant, atoms }.normalized()
    }

    pub fn lub(&self, other: &Level) -> Level {
        let mut atoms = self.atoms.clone();
        for (a, k) in &other.atoms {
            let e = atoms.entry(*a).or_insert(*k);
            *e = (*e).max(*k);
        }
        Level {
            constant: self.constant.max(other.constant),
            atoms,
        }
        .normalized()
    }

    pub fn mentions(&self, a: LevelAtom) -> bool {
        self.atoms.contains_key(&a)
    }

    pub fn mentions_var_at_or_above(&self, lvl: usize) -> bool {
        self.atoms
            .keys()
            .any(|a| matches!(a, LevelAtom::Var(v) if *v >= lvl))
    }

    /// Replace an atom by a level, re-normalizing.
    pub fn substitute(&self, a: LevelAtom, by: &Level) -> Level {
        match self.atoms.get(&a) {
            None => self.clone(),
            Some(&off) => {
                let mut rest = self.clone();
                rest.atoms.remove(&a);
                if rest.atoms.is_empty() && rest.constant == 0 {
                    return by.plus(off);
                }
                rest.lub(&by.plus(off))
            }
        }
    }

    /// `self - k` if every component of `self` is at least `k`.
    pub fn minus(&self, k: u32) -> Option<Level> {
        if k == 0 {
            return Some(self.clone());
        }
        let mut atoms = BTreeMap::new();
        for (a, o) in &self.atoms {
            atoms.insert(*a, o.checked_sub(k)?);
        }
        let constant = if self.constant == 0 && !self.atoms.is_empty() {
            0
        } else {
            self.constant.checked_sub(k)?
        };
        Some(Level { constant, atoms }.normalized())
    }

    /// If this level is exactly `atom + k`, return them.
    pub fn as_single_atom(&self) -> Option<(LevelAtom, u32)> {
        if self.constant == 0 && self.atoms.len() == 1 {
            self.atoms.iter().next().map(|(a, k)| (*a, *k))
        } else {
            None
        }
    }

    pub fn eval_with(&self, val: &dyn Fn(LevelAtom) -> u64) -> u64 {
        self.atoms
            .iter()
            .map(|(a, k)| val(*a) + u64::from(*k))
            .fold(u64::from(self.constant), u64::max)
    }
}

/// Normalize a level expression.
pub fn level_normalize(e: &LevelExpr) -> Level {
    match e {
        LevelExpr::Zero => Level::zero(),
        LevelExpr::Atom(a) => Level::atom(*a),
        LevelExpr::Suc(e) => level_normalize(e).suc(),
        LevelExpr::Max(a, b) => level_normalize(a).lub(&level_normalize(b)),
    }
}

/// Universe levels are compared exactly: no cumulativity.
pub fn level_equal(a: &Level, b: &Level) -> bool {
    a == b
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.constant > 0 || self.atoms.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (a, k) in &self.atoms {
            let base = match a {
                LevelAtom::Var(v) => format!("#{v}"),
                LevelAtom::Meta(m) => format!("?{m}"),
            };
            if *k == 0 {
                parts.push(base);
            } else {
                parts.push(format!("{base}+{k}"));
            }
        }
        if parts.len() == 1 {
            f.write_str(&parts[0])
        } else {
            write!(f, "max({})", parts.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l() -> LevelExpr {
        LevelExpr::var(0)
    }
    fn k() -> LevelExpr {
        LevelExpr::var(1)
    }

    #[test]
    fn constant_fold() {
        let e = LevelExpr::max(LevelExpr::Zero, LevelExpr::suc(LevelExpr::Zero));
        assert_eq!(level_normalize(&e), Level::constant(1));
    }

    #[test]
    fn idempotent_lub() {
        assert_eq!(level_normalize(&LevelExpr::max(l(), l())), Level::var(0));
    }

    #[test]
    fn zero_is_unit() {
        let a = level_normalize(&l());
        let b = level_normalize(&LevelExpr::max(l(), LevelExpr::Zero));
        assert!(level_equal(&a, &b));
        assert!(level_equal(&Level::zero(), &Level::zero()));
    }

    #[test]
    fn suc_is_distinct() {
        assert!(!level_equal(
            &level_normalize(&l()),
            &level_normalize(&LevelExpr::suc(l()))
        ));
    }

    #[test]
    fn suc_distributes_over_lub() {
        let a = LevelExpr::suc(LevelExpr::max(l(), k()));
        let b = LevelExpr::max(LevelExpr::suc(l()), LevelExpr::suc(k()));
        // oracle: both expressions agree under every valuation in 0..3
        for x in 0..4u64 {
            for y in 0..4u64 {
                let v = |at: LevelAtom| match at {
                    LevelAtom::Var(0) => x,
                    _ => y,
                };
                assert_eq!(a.eval_with(&v), b.eval_with(&v));
            }
        }
        assert_eq!(level_normalize(&a), level_normalize(&b));
    }

    #[test]
    fn dominated_constant_dropped() {
        let e = LevelExpr::max(LevelExpr::suc(LevelExpr::Zero), LevelExpr::suc(l()));
        assert_eq!(level_normalize(&e), Level::var(0).suc());
        let e = LevelExpr::max(
            LevelExpr::suc(LevelExpr::suc(LevelExpr::Zero)),
            LevelExpr::suc(l()),
        );
        assert_eq!(level_normalize(&e).constant_part(), 2);
    }

    #[test]
    fn minus_and_substitute() {
        let a = Level::var(0).suc().lub(&Level::constant(3));
        assert_eq!(a.minus(1), Some(Level::var(0).lub(&Level::constant(2))));
        assert_eq!(Level::var(0).minus(1), None);
        let s = Level::meta(4)
            .suc()
            .substitute(LevelAtom::Meta(4), &Level::var(2));
        assert_eq!(s, Level::var(2).suc());
    }

    fn arb_expr() -> impl Strategy<Value = LevelExpr> {
        let leaf = prop_oneof![Just(LevelExpr::Zero), (0usize..3).prop_map(LevelExpr::var),];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(LevelExpr::suc),
                (inner.clone(), inner).prop_map(|(a, b)| LevelExpr::max(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn normal_form_agrees_with_semantics(a in arb_expr(), b in arb_expr()) {
            let na = level_normalize(&a);
            let nb = level_normalize(&b);
            // valuations range past every constant the generator can build
            let mut all_equal = true;
            for x in 0..10u64 { for y in 0..10u64 { for z in 0..10u64 {
                let v = |at: LevelAtom| match at {
                    LevelAtom::Var(0) => x, LevelAtom::Var(1) => y, _ => z,
                };
                prop_assert_eq!(na.eval_with(&v), a.eval_with(&v));
                if a.eval_with(&v) != b.eval_with(&v) { all_equal = false; }
            }}}
            prop_assert_eq!(all_equal, level_equal(&na, &nb));
        }

        #[test]
        fn normalize_idempotent(a in arb_expr()) {
            let n = level_normalize(&a);
            prop_assert_eq!(n.lub(&Level::zero()), n.clone());
            prop_assert_eq!(n.plus(0), n);
        }
    }
}
