use oeg::bench::*;
use oeg::fixtures;
use oeg::reconcile::Variant;

fn suite(entries: &str, extra: &str) -> Result<SuiteConfig, LoadError> {
    let text = format!(r#"{{"entries": [{entries}] {extra}}}"#);
    SuiteConfig::from_json(&text, fixtures::dir())
}

const MINIROVER: &str = r#"{"id": "minirover", "domain": "minirover-domain.pddl", "problem": "minirover-problem.pddl", "human_domain": "minirover-human.pddl"}"#;
const MINIROVER2: &str = r#"{"id": "minirover2", "domain": "minirover2-domain.pddl", "problem": "minirover2-problem.pddl", "remove_features_file": "minirover2-remove.txt"}"#;

fn without_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split(',').collect();
            cols.remove(6);
            cols.join(",")
        })
        .collect()
}

#[test]
fn minirover_runs_every_method() {
    let config = suite(MINIROVER, "").unwrap();
    assert_eq!(config.methods, Variant::ALL);
    let records = run_suite(&config);
    assert_eq!(records.len(), 5);
    for r in &records {
        assert!(r.verified, "{r:?}");
        assert_eq!(r.total_features, Some(1));
        assert!(r.error.is_none());
    }
    let md = emit_table(&records, Format::Markdown);
    let body = md.lines().filter(|l| l.starts_with("| minirover |")).count();
    assert_eq!(body, 5);
    assert!(md.ends_with(DISTANCE_NOTE));
    assert!(md.starts_with("| problem | method |"));
}

#[test]
fn minirover2_pp_row() {
    let config = suite(MINIROVER2, r#", "methods": ["oeg-pp"], "oracle_checks": true"#).unwrap();
    let records = run_suite(&config);
    assert_eq!(records.len(), 1);
    let r = &records[0];
    assert_eq!(
        (r.total_features, r.num_parts, r.avg_part_size, r.distance),
        (Some(2), Some(2), Some(1.0), Some(0.0))
    );
    assert_eq!(r.oracle_verified, Some(true));
    let csv = emit_table(&records, Format::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], COLUMNS.join(","));
    assert!(lines[1].starts_with("minirover2,oeg-pp,2,2,1.000,0.000,"));
    assert!(lines[1].ends_with(",true"));
}

#[test]
fn empty_table_is_header_only() {
    assert_eq!(emit_table(&[], Format::Csv), format!("{}\n", COLUMNS.join(",")));
    assert_eq!(emit_table(&[], Format::Json).trim(), "[]");
    assert_eq!(
        emit_table(&[], Format::Markdown)
            .lines()
            .filter(|l| l.starts_with('|'))
            .count(),
        2
    );
}

#[test]
fn config_errors() {
    assert!(matches!(
        suite(MINIROVER, r#", "time_limit": 0"#),
        Err(LoadError::Config(_))
    ));
    assert!(matches!(
        suite(MINIROVER, r#", "time_limit": -3"#),
        Err(LoadError::Config(_))
    ));
    let both = r#"{"id": "x", "domain": "minirover-domain.pddl", "problem": "minirover-problem.pddl", "human_domain": "minirover-human.pddl", "remove_features": []}"#;
    assert!(matches!(suite(both, ""), Err(LoadError::Config(_))));
    let none = r#"{"id": "x", "domain": "minirover-domain.pddl", "problem": "minirover-problem.pddl"}"#;
    assert!(matches!(suite(none, ""), Err(LoadError::Config(_))));
    assert!(matches!(
        suite(MINIROVER, r#", "colour": "blue""#),
        Err(LoadError::Config(_))
    ));
    assert!(matches!(
        suite(MINIROVER, r#", "methods": ["mcee"]"#),
        Err(LoadError::Config(_))
    ));
    assert!(matches!(
        SuiteConfig::load(std::path::Path::new("/nonexistent/suite.json")),
        Err(LoadError::Io { .. })
    ));
}

#[test]
fn bad_entries_become_error_rows() {
    let bad = r#"{"id": "bad", "domain": "minirover-domain.pddl", "problem": "minirover-problem.pddl", "remove_features": ["fly-has-precondition-wings"]}"#;
    let config = suite(&format!("{bad}, {MINIROVER}"), r#", "methods": ["mce", "oeg-pp"]"#).unwrap();
    let records = run_suite(&config);
    assert_eq!(records.len(), 4);
    for r in &records[..2] {
        assert_eq!(r.problem, "bad");
        assert!(!r.verified);
        assert!(r.error.is_some());
        assert_eq!(r.total_features, None);
    }
    assert!(records[2..].iter().all(|r| r.verified));
    let csv = emit_table(&records, Format::Csv);
    assert!(csv.lines().nth(1).unwrap().starts_with("bad,mce,n/a,n/a,n/a,n/a,"));
}

#[test]
fn bundled_suite_is_deterministic() {
    let config = SuiteConfig::from_json(fixtures::SUITE_JSON, fixtures::dir()).unwrap();
    let a = run_suite(&config);
    let b = run_suite(&config);
    assert_eq!(a.len(), 30);
    assert!(a.iter().all(|r| r.verified), "{a:#?}");
    assert!(a.iter().all(|r| r.oracle_verified != Some(false)));
    for r in &a {
        let (avg, total, parts) = (
            r.avg_part_size.unwrap(),
            r.total_features.unwrap() as f64,
            r.num_parts.unwrap(),
        );
        assert!(avg <= total);
        if parts > 0 {
            assert_eq!(avg == total, parts == 1, "{r:?}");
        }
    }
    assert_eq!(
        without_time(&emit_table(&a, Format::Csv)),
        without_time(&emit_table(&b, Format::Csv))
    );

    let mut parallel = config.clone();
    parallel.parallel = true;
    assert_eq!(
        without_time(&emit_table(&run_suite(&parallel), Format::Csv)),
        without_time(&emit_table(&a, Format::Csv))
    );
}

#[test]
fn json_rows_carry_oracle_column() {
    let config = suite(MINIROVER, r#", "methods": ["mce", "oeg-na"], "oracle_checks": true"#).unwrap();
    let json: serde_json::Value = serde_json::from_str(&emit_table(&run_suite(&config), Format::Json)).unwrap();
    assert_eq!(json[0]["oracle_verified"], true);
    assert!(json[1]["oracle_verified"].is_null());
    assert_eq!(json[0]["method"], "mce");
}
