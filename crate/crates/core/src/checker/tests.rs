use super::*;
use crate::error::ErrorCode;
use crate::pretty::print_closed;

fn check(src: &str) -> Result<Checker, Diagnostic> {
    let mut c = Checker::new();
    c.check_source("t.cohtt", src)?;
    Ok(c)
}

fn code(src: &str) -> ErrorCode {
    check(src).expect_err("expected a diagnostic").code
}

#[test]
fn universe_of_set_zero() {
    let c = Checker::new();
    let (t, ty) = c.elaborate_term("t", "Set lzero").unwrap();
    assert_eq!(print_closed(&t), "Set lzero");
    assert_eq!(print_closed(&ty), "Set (lsuc lzero)");
}

#[test]
fn polymorphic_identity() {
    check("def id : (A : Set lzero) -> A -> A := \\A a. a").unwrap();
}

#[test]
fn flat_of_crisp_type() {
    check("def F (@flat A : Set lzero) : Set lzero := Flat A").unwrap();
}

#[test]
fn flat_of_cohesive_type_is_modal_error() {
    assert_eq!(
        code("def F (A : Set lzero) : Set lzero := Flat A"),
        ErrorCode::Modal
    );
}

#[test]
fn counit() {
    check("def eps {@flat l : Level} {@flat A : Set l} (x : Flat A) : A := let con y = x in y")
        .unwrap();
}

#[test]
fn con_of_non_crisp_is_modal_error() {
    let src = "def bad {@flat A : Set lzero} (a : A) : Flat A := con a";
    assert_eq!(code(src), ErrorCode::Modal);
}

#[test]
fn refl_mismatch() {
    assert_eq!(
        code("def r : true = false := refl"),
        ErrorCode::TypeMismatch
    );
}

#[test]
fn wrong_body_type() {
    assert_eq!(code("def b : Bool := tt"), ErrorCode::TypeMismatch);
}

#[test]
fn unbound_and_duplicate() {
    assert_eq!(code("def b : Bool := c"), ErrorCode::UnboundName);
    assert_eq!(
        code("postulate I : Set lzero\npostulate I : Set lzero"),
        ErrorCode::Duplicate
    );
}

#[test]
fn recursive_definition_rejected() {
    assert_eq!(code("def f (b : Bool) : Bool := f b"), ErrorCode::Recursive);
}

#[test]
fn implicits_are_solved() {
    let src = "def id {l : Level} {A : Set l} (a : A) : A := a\n\
               def t : Bool := id true\n\
               def u : Bool := id {A := Bool} false";
    check(src).unwrap();
}

#[test]
fn unknown_named_implicit() {
    let src = "def id {l : Level} {A : Set l} (a : A) : A := a\n\
               def t : Bool := id {B := Bool} true";
    assert_eq!(code(src), ErrorCode::UnknownImplicit);
}

#[test]
fn unconstrained_implicit_is_unsolved() {
    let src = "def k {l : Level} {A : Set l} : Bool := true\n\
               def t : Bool := k";
    assert_eq!(code(src), ErrorCode::UnsolvedMeta);
}

#[test]
fn fst_solves_from_pair_type() {
    check("def f (p : Bool * Unit) : Bool := fst p").unwrap();
}

#[test]
fn set_omega_only_as_declaration_type() {
    check("def R : SetOmega := {l : Level} (A : Set l) -> A -> A").unwrap();
    assert_eq!(code("def R : Set lzero := SetOmega"), ErrorCode::Universe);
}

#[test]
fn rewrite_registers_rule() {
    let src = "postulate I : Set lzero\n\
               postulate i0 : I\n\
               postulate f : I -> Bool\n\
               postulate fi0 : f i0 = true\n\
               rewrite fi0\n\
               def t : f i0 = true := refl";
    let c = check(src).unwrap();
    assert_eq!(c.signature().rules().len(), 1);
}

#[test]
fn rewrite_of_non_identity() {
    let src = "postulate p : Bool\nrewrite p";
    assert_eq!(code(src), ErrorCode::RewriteNotIdentity);
}

#[test]
fn crisp_position_masks() {
    let ctx = Context::new()
        .bind("A", Rc::new(crate::nbe::Value::Bool), true)
        .bind("x", Rc::new(crate::nbe::Value::Bool), false);
    assert_eq!(check_crisp_position(&ctx).usable, vec![true, false]);
}
