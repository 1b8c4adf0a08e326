mod common;

use cohtt::checker::{CheckOptions, Checker};
use cohtt::nbe::{normalize, DEFAULT_BUDGET};
use cohtt::parser::parse_term;
use cohtt::pretty::print_closed;
use cohtt::signature::{DeclKind, Signature};
use cohtt::syntax::{pi_telescope, shift, Binder, Term};
use common::{corpus_sig, nf};
use proptest::prelude::*;
use std::rc::Rc;

fn sig() -> &'static Signature {
    // Signatures hold `Rc`s, so each test thread keeps its own copy.
    thread_local! {
        static SIG: &'static Signature = Box::leak(Box::new(corpus_sig()));
    }
    SIG.with(|s| *s)
}

fn elaborate_printed(sig: &Signature, printed: &str) -> String {
    let c = Checker::from_signature(sig.clone(), CheckOptions::default());
    let (t, _) = c
        .elaborate_term("<printed>", printed)
        .unwrap_or_else(|d| panic!("`{printed}` does not re-elaborate: {d}"));
    print_closed(&t)
}

/// Printing a checked type and checking the text again gives back the same
/// core term.
#[test]
fn printed_types_round_trip() {
    let sig = sig();
    for d in sig
        .declarations()
        .iter()
        .filter(|d| d.kind != DeclKind::Rewrite)
    {
        let printed = print_closed(&d.ty);
        parse_term("<printed>", &printed).unwrap_or_else(|e| panic!("{}: {e}", d.name));
        let mut c = Checker::from_signature(sig.clone(), CheckOptions::default());
        c.check_source("<printed>", &format!("postulate roundTrip : {printed}"))
            .unwrap_or_else(|e| panic!("type of {} does not re-check: {e}", d.name));
        let again = &c.signature().lookup("roundTrip").unwrap().ty;
        assert_eq!(**again, *d.ty, "{}", d.name);
    }
}

#[test]
fn normal_forms_are_normal_and_well_typed() {
    let sig = sig();
    let mut checked = 0;
    for d in sig.declarations() {
        let Some(body) = &d.body else { continue };
        let once = normalize(sig, body, DEFAULT_BUDGET).expect("within budget");
        let twice = normalize(sig, &once, DEFAULT_BUDGET).expect("within budget");
        assert_eq!(print_closed(&once), print_closed(&twice), "{}", d.name);

        let src = format!(
            "def nf_{} : {} := {}",
            d.name,
            print_closed(&d.ty),
            print_closed(&once)
        );
        let mut c = Checker::from_signature(sig.clone(), CheckOptions::default());
        c.check_source("<nf>", &src)
            .unwrap_or_else(|e| panic!("normal form of {} does not check: {e}", d.name));
        checked += 1;
    }
    assert!(checked > 40);
}

/// Closed arithmetic over the corpus naturals, with its value computed
/// directly as an oracle.
#[derive(Clone, Debug)]
enum Arith {
    Zero,
    Succ(Box<Arith>),
    Plus(Box<Arith>, Box<Arith>),
}

impl Arith {
    fn value(&self) -> usize {
        match self {
            Arith::Zero => 0,
            Arith::Succ(a) => a.value() + 1,
            Arith::Plus(a, b) => a.value() + b.value(),
        }
    }

    fn source(&self) -> String {
        match self {
            Arith::Zero => "zero".into(),
            Arith::Succ(a) => format!("succ ({})", a.source()),
            Arith::Plus(a, b) => format!("plus ({}) ({})", a.source(), b.source()),
        }
    }
}

fn numeral(n: usize) -> String {
    (0..n).fold("zero".to_string(), |acc, _| {
        if acc == "zero" {
            "succ zero".into()
        } else {
            format!("succ ({acc})")
        }
    })
}

fn arith() -> impl Strategy<Value = Arith> {
    Just(Arith::Zero).prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Arith::Succ(Box::new(a))),
            (inner.clone(), inner).prop_map(|(a, b)| Arith::Plus(Box::new(a), Box::new(b))),
        ]
    })
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn arithmetic_normalizes_to_its_value(a in arith()) {
        let got = nf(sig(), &a.source());
        prop_assert_eq!(got, numeral(a.value()));
    }

    #[test]
    fn right_unit_proofs_compute(a in arith()) {
        let got = nf(sig(), &format!("zeroIdR ({})", a.source()));
        prop_assert_eq!(got, "refl");
    }

    #[test]
    fn normal_forms_reparse(a in arith()) {
        let printed = nf(sig(), &a.source());
        prop_assert_eq!(elaborate_printed(sig(), &printed), printed.clone());
    }
}

fn strip_lambdas(mut t: &Term, n: usize) -> &Term {
    for _ in 0..n {
        match t {
            Term::Lam(_, b) => t = b,
            other => panic!("expected {n} lambdas, got {}", print_closed(other)),
        }
    }
    t
}

/// For every rule, the two sides of its source identity evaluate to the
/// compiled pattern and replacement, when the rule itself is left out.
#[test]
fn rules_round_trip() {
    let sig = sig();
    for rule in sig.rules() {
        let proof = sig.lookup(&rule.name).unwrap();
        let (tele, body) = pi_telescope(&proof.ty);
        let Term::IdType(_, lhs, rhs) = body else {
            panic!("{} is not an identity", rule.name)
        };
        let abstracted = |t: &Term| {
            tele.iter()
                .rev()
                .fold(t.clone(), |acc, (b, _)| Term::Lam(b.clone(), Rc::new(acc)))
        };
        let before = sig.without_rules(&[&rule.name]);
        let n = tele.len();
        let l = normalize(&before, &abstracted(lhs), DEFAULT_BUDGET).unwrap();
        if sig.lookup(&rule.head).unwrap().kind == DeclKind::Postulate {
            assert_eq!(*strip_lambdas(&l, n), rule.lhs(), "{}", rule.name);
        } else {
            // A defined head unfolds once its rule is gone.
            let pattern = normalize(&before, &abstracted(&rule.lhs()), DEFAULT_BUDGET).unwrap();
            assert_eq!(l, pattern, "{}", rule.name);
        }
        // With the rule in place the left side computes to the right.
        let fired = normalize(sig, &abstracted(lhs), DEFAULT_BUDGET).unwrap();
        assert_eq!(
            fired,
            normalize(sig, &abstracted(rhs), DEFAULT_BUDGET).unwrap(),
            "{}",
            rule.name
        );
        let r = normalize(&before, &abstracted(rhs), DEFAULT_BUDGET).unwrap();
        let compiled = normalize(&before, &abstracted(&rule.rhs), DEFAULT_BUDGET).unwrap();
        assert_eq!(r, compiled, "{}", rule.name);
    }
}

/// Simple types over Bool and Unit.
#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Bool,
    Unit,
    Fun(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn term(&self) -> Term {
        match self {
            Ty::Bool => Term::Bool,
            Ty::Unit => Term::Unit,
            Ty::Fun(a, b) => Term::pi("_", a.term(), shift(&b.term(), 1, 0)),
        }
    }
}

fn ty() -> impl Strategy<Value = Ty> {
    prop_oneof![Just(Ty::Bool), Just(Ty::Unit)].prop_recursive(2, 6, 2, |inner| {
        (inner.clone(), inner).prop_map(|(a, b)| Ty::Fun(Box::new(a), Box::new(b)))
    })
}

/// Well-typed terms of `want` in a context of simple types, innermost last.
fn typed(want: Ty, ctx: Vec<Ty>, fuel: u32) -> BoxedStrategy<Term> {
    let vars: Vec<Term> = ctx
        .iter()
        .rev()
        .enumerate()
        .filter(|(_, t)| **t == want)
        .map(|(i, _)| Term::var(i))
        .collect();
    let mut leaves: Vec<BoxedStrategy<Term>> = vars.into_iter().map(|v| Just(v).boxed()).collect();
    match &want {
        Ty::Bool => {
            leaves.push(Just(Term::True).boxed());
            leaves.push(Just(Term::False).boxed());
        }
        Ty::Unit => leaves.push(Just(Term::TT).boxed()),
        Ty::Fun(a, b) => {
            let mut inner = ctx.clone();
            inner.push((**a).clone());
            let binder = Binder::explicit("x");
            leaves.push(
                typed((**b).clone(), inner, fuel.saturating_sub(1))
                    .prop_map(move |body| Term::Lam(binder.clone(), Rc::new(body)))
                    .boxed(),
            );
        }
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    if fuel == 0 {
        return leaf;
    }
    let motive = Term::lam("w", shift(&want.term(), 1, 0));
    let elim = (
        typed(want.clone(), ctx.clone(), fuel - 1),
        typed(want.clone(), ctx.clone(), fuel - 1),
        typed(Ty::Bool, ctx.clone(), fuel - 1),
    )
        .prop_map(move |(t, f, b)| Term::BoolElim {
            motive: Rc::new(motive.clone()),
            crisp: false,
            t_case: Rc::new(t),
            f_case: Rc::new(f),
            target: Rc::new(b),
        });
    let fun = Ty::Fun(Box::new(Ty::Bool), Box::new(want.clone()));
    let app = (
        typed(fun, ctx.clone(), fuel - 1),
        typed(Ty::Bool, ctx, fuel - 1),
    )
        .prop_map(|(f, a)| Term::app(f, a));
    prop_oneof![2 => leaf, 1 => elim, 1 => app].boxed()
}

/// A direct interpreter for the fragment, used as an oracle.
#[derive(Clone)]
enum Sem {
    Bool(bool),
    Unit,
    Fun(Vec<Sem>, Rc<Term>),
}

fn interpret(env: &[Sem], t: &Term) -> Sem {
    match t {
        Term::Var(i) => env[env.len() - 1 - i].clone(),
        Term::True => Sem::Bool(true),
        Term::False => Sem::Bool(false),
        Term::TT => Sem::Unit,
        Term::Lam(_, b) => Sem::Fun(env.to_vec(), b.clone()),
        Term::App(f, a, _) => {
            let Sem::Fun(mut cl, body) = interpret(env, f) else {
                panic!("not a function")
            };
            cl.push(interpret(env, a));
            interpret(&cl, &body)
        }
        Term::BoolElim {
            t_case,
            f_case,
            target,
            ..
        } => match interpret(env, target) {
            Sem::Bool(true) => interpret(env, t_case),
            Sem::Bool(false) => interpret(env, f_case),
            _ => panic!("not a boolean"),
        },
        other => panic!("outside the fragment: {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn readback_is_stable((t, _) in ty().prop_flat_map(|a| (typed(a.clone(), Vec::new(), 3), Just(a)))) {
        let empty = Signature::new();
        let once = normalize(&empty, &t, DEFAULT_BUDGET).unwrap();
        let twice = normalize(&empty, &once, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn closed_booleans_are_canonical(t in typed(Ty::Bool, Vec::new(), 4)) {
        let nf = normalize(&Signature::new(), &t, DEFAULT_BUDGET).unwrap();
        let Sem::Bool(b) = interpret(&[], &t) else { unreachable!() };
        prop_assert_eq!(nf, if b { Term::True } else { Term::False });
    }
}
