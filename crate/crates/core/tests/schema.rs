mod common;

use common::*;
use hott::driver::Item;
use hott::DeclKind;

fn generated(env_file: &str, name: &str) -> Vec<String> {
    let report = check(&[fixture(env_file)], 1);
    assert_eq!(report.exit_code(), 0, "{}", report.render_diagnostics());
    report
        .files
        .iter()
        .flat_map(|f| f.items.iter())
        .find_map(|i| match i {
            Item::Schema(s) if s.name.as_ref() == name => match &s.kind {
                DeclKind::SchemaInstance { generated, .. } => {
                    Some(generated.iter().map(|g| g.to_string()).collect())
                }
                _ => None,
            },
            _ => None,
        })
        .unwrap_or_else(|| panic!("no schema instance `{name}`"))
}

#[test]
fn circle_induction_matches_hand_written_rule() {
    let path = fixture("pos/circle-rule.hott");
    let env = env_after(&path);
    let rule = env.unfold("circle-ind-rule").expect("rule").clone();
    let ind = env.type_of("Circle.ind").expect("Circle.ind").clone();
    assert!(conv(&env, &rule, &ind));
    let rec = env.type_of("Circle.rec").expect("Circle.rec").clone();
    assert!(!conv(&env, &rule, &rec));
}

#[test]
fn generic_wsusp_induction_matches_hand_written_rule() {
    let env = env_after(&fixture("pos/wsusp-rule.hott"));
    for (rule, c) in [("w-ind-rule", "W.ind"), ("w-pt-beta-rule", "W.ind-beta-pt")] {
        let r = env.unfold(rule).expect("rule").clone();
        let t = env.type_of(c).expect("constant").clone();
        assert!(conv(&env, &r, &t), "{rule} vs {c}");
    }
}

#[test]
fn wsusp_generates_nine_constants_at_each_level() {
    let want = [
        "", ".pt", ".cl", ".rec", ".rec-beta-pt", ".rec-beta-cl", ".ind", ".ind-beta-pt",
        ".ind-beta-cl",
    ];
    for name in ["Circle", "Circle0"] {
        let mut got = generated("pos/circle-rule.hott", name);
        got.sort();
        let mut expect: Vec<String> = want.iter().map(|s| format!("{name}{s}")).collect();
        expect.sort();
        assert_eq!(got, expect);
    }
}

#[test]
fn levels_control_the_motive_universe() {
    let env = env_after(&fixture("pos/circle-rule.hott"));
    let at = |c: &str, src: &str| conv(&env, env.type_of(c).unwrap(), &term(src, &[]));
    assert!(at(
        "Circle0.rec",
        "Pi (X : U0) (p : Unit -> X) -> (Unit -> Unit -> Id X (p tt) (p tt)) -> Circle0 -> X"
    ));
    assert!(at(
        "Circle.rec",
        "Pi (X : U1) (p : Unit -> X) -> (Unit -> Unit -> Id X (p tt) (p tt)) -> Circle -> X"
    ));
}

#[test]
fn trunc_generates_seven_constants() {
    let report = check(&[stdlib().join("trunc.hott")], 1);
    let n = report
        .files
        .iter()
        .flat_map(|f| f.items.iter())
        .find_map(|i| match i {
            Item::Schema(s) => match &s.kind {
                DeclKind::SchemaInstance { generated, .. } if s.name.as_ref() == "BoolTrunc" => {
                    Some(generated.len())
                }
                _ => None,
            },
            _ => None,
        });
    assert_eq!(n, Some(7));
}
