mod common;

use std::time::Instant;

use common::*;
use hott::Evaluator;

#[test]
fn j_computes_on_refl_only() {
    let start = Instant::now();
    let env = env_after(&fixture("pos/j-computation.hott"));
    assert!(conv_src(&env, &[], "J E d M M (refl A M)", "d M"));
    assert!(!conv_src(&env, &[], "J E d M M p", "d M"));
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn j_on_refl_with_lambda_motive() {
    let env = env_after(&fixture("pos/j-computation.hott"));
    assert!(conv_src(
        &env,
        &[],
        "J (fun x y q => A) (fun x => x) M M (refl A M)",
        "M"
    ));
}

#[test]
fn function_eta_accepted_pair_eta_rejected() {
    let env = env_after(&fixture("pos/eta.hott"));
    assert!(conv_src(&env, &["f"], "f", "fun x => f x"));
    assert!(conv_src(&env, &["f"], "fun x y => f x y", "f"));
    assert!(!conv_src(&env, &["p"], "p", "pair (fst p) (snd p)"));
    assert!(!conv_src(&env, &["p"], "pair (fst p) (snd p)", "p"));
}

#[test]
fn groupoid_laws_at_refl() {
    let env = stdlib_env();
    let n = ["A", "x", "y", "p"];
    assert!(conv_src(&env, &n, "inv A x x (refl A x)", "refl A x"));
    assert!(conv_src(&env, &n, "concat A x x x (refl A x) (refl A x)", "refl A x"));
    assert!(conv_src(&env, &n, "concat A x y y p (refl A y)", "p"));
    // Only the right unit law is definitional.
    assert!(!conv_src(&env, &n, "concat A x x y (refl A x) p", "p"));
    assert!(!conv_src(&env, &n, "inv A x y p", "p"));
}

#[test]
fn transport_and_ap_at_refl() {
    let env = stdlib_env();
    let n = ["A", "B", "P", "f", "g", "x", "u"];
    assert!(conv_src(&env, &n, "transport A P x x (refl A x) u", "u"));
    assert!(conv_src(&env, &n, "ap A B f x x (refl A x)", "refl B (f x)"));
    assert!(conv_src(&env, &n, "apd A P g x x (refl A x)", "refl (P x) (g x)"));
}

#[test]
fn triangle_and_square_rotation_at_refl() {
    let env = stdlib_env();
    let n = ["T", "x", "y", "u", "v", "eps"];
    let lhs = "I-tri T x y y u v (refl T y) eps";
    let rhs = "concat (Id T x y) v (concat T x y y v (refl T y)) (concat T x y y u (refl T y)) \
                 (inv (Id T x y) (concat T x y y v (refl T y)) v (idr T x y v)) \
                 (concat (Id T x y) (concat T x y y v (refl T y)) u (concat T x y y u (refl T y)) \
                    (inv (Id T x y) u (concat T x y y v (refl T y)) eps) \
                    (inv (Id T x y) (concat T x y y u (refl T y)) u (idr T x y u)))";
    assert!(conv_src(&env, &n, lhs, rhs));

    // With every side refl the rotated square is the composite of unit laws
    // around the given 2-path.
    let n = ["T", "a", "eps"];
    let lhs = "I-sq T a a a a (refl T a) (refl T a) (refl T a) (refl T a) eps";
    let rhs = "concat (Id T a a) (concat T a a a (refl T a) (refl T a)) (refl T a) \
                 (concat T a a a (refl T a) (refl T a)) \
                 (idl T a a (refl T a)) \
                 (concat (Id T a a) (refl T a) (concat T a a a (refl T a) (refl T a)) \
                    (concat T a a a (refl T a) (refl T a)) \
                    (inv (Id T a a) (concat T a a a (refl T a) (refl T a)) (refl T a) (idr T a a (refl T a))) \
                    (concat (Id T a a) (concat T a a a (refl T a) (refl T a)) \
                       (concat T a a a (refl T a) (refl T a)) (concat T a a a (refl T a) (refl T a)) \
                       eps \
                       (concat (Id T a a) (concat T a a a (refl T a) (refl T a)) (refl T a) \
                          (concat T a a a (refl T a) (refl T a)) \
                          (idl T a a (refl T a)) \
                          (inv (Id T a a) (concat T a a a (refl T a) (refl T a)) (refl T a) \
                             (idr T a a (refl T a))))))";
    assert!(conv_src(&env, &n, lhs, rhs));
}

#[test]
fn hit_computation_is_not_definitional() {
    let env = stdlib_env();
    let n = ["X", "p", "s"];
    assert!(!conv_src(&env, &n, "Circle.rec X p s (Circle.pt tt)", "p tt"));
    assert!(!conv_src(&env, &["X", "c", "s"], "BoolTrunc.rec X c s (BoolTrunc.inj true)", "c true"));
}

#[test]
fn whnf_unfolds_definitions_lazily() {
    let env = stdlib_env();
    let ev = Evaluator::new(&env);
    let t = term("idr A x y p", &["A", "x", "y", "p"]);
    let nf = ev.whnf(&t);
    assert!(conv(&env, &nf, &term("refl (Id A x y) p", &["A", "x", "y", "p"])));
}
