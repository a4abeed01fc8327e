mod common;

use common::*;

#[test]
fn every_negative_fixture_fails_at_its_marker() {
    let files = hott_files(&fixtures().join("neg"));
    assert!(files.len() >= 25, "only {} negative fixtures", files.len());
    let failures: Vec<String> = files
        .iter()
        .filter_map(|f| check_negative(f).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn categories_are_covered() {
    let names: Vec<String> = hott_files(&fixtures().join("neg"))
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for prefix in ["refl-", "universe-", "pair-eta", "j-motive", "hit-"] {
        assert!(names.iter().any(|n| n.starts_with(prefix)), "no `{prefix}` fixture");
    }
}

#[test]
fn universe_fixtures_report_violations() {
    for f in hott_files(&fixtures().join("neg")) {
        if !f.file_name().unwrap().to_string_lossy().starts_with("universe-u") {
            continue;
        }
        let report = check(std::slice::from_ref(&f), 1);
        assert!(
            report.diagnostics.iter().any(|d| d.message.starts_with("universe violation")),
            "{}: {}",
            f.display(),
            report.render_diagnostics()
        );
    }
}
