//! File-format behavior: per-row diagnostics, round-tripping, windows,
//! and the malformed-row threshold.

use std::fs;
use std::path::Path;

use bugassign_cli::corpus_io::{
    load_corpus, parse_timestamp, save_corpus, CorpusFormat, LoadOptions,
};
use bugassign_core::corpus::{TimeWindow, Timestamp, MISSING};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn row(id: u64, assignee: &str) -> String {
    format!(
        r#"{{"id":{id},"summary":"crash on save","component":"editor","op_sys":"linux","priority":"P2","severity":"major","reporter":"rep","assignee":"{assignee}","status":"RESOLVED","resolution":"FIXED","created_at":"2012-01-0{}T10:00:00Z","modified_at":"2012-01-09T10:00:00Z","product":"wb"}}"#,
        (id % 7) + 1
    )
}

#[test]
fn empty_file_loads_an_empty_corpus() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "empty.jsonl", "");
    let (corpus, diag) = load_corpus(&path, &LoadOptions::default()).unwrap();
    assert_eq!(corpus.len(), 0);
    assert_eq!(corpus.developers().len(), 0);
    assert_eq!(diag.skipped(), 0);
}

#[test]
fn two_rows_one_assignee() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "two.jsonl",
        &format!("{}\n{}\n", row(1, "ann"), row(2, "ann")),
    );
    let (corpus, _) = load_corpus(&path, &LoadOptions::default()).unwrap();
    let stats = corpus.stats();
    assert_eq!(stats.n_reports, 2);
    assert_eq!(stats.n_developers, 1);
}

#[test]
fn missing_assignee_is_skipped_and_counted() {
    let dir = TempDir::new().unwrap();
    let no_assignee = row(2, "");
    let path = write(
        dir.path(),
        "three.jsonl",
        &format!("{}\n{}\n{}\n", row(1, "ann"), no_assignee, row(3, "bob")),
    );
    let (corpus, diag) = load_corpus(&path, &LoadOptions::default()).unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(diag.missing_assignee, 1);
    assert_eq!(diag.skipped(), 1);
}

#[test]
fn unparseable_lines_count_as_malformed() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "bad.jsonl",
        &format!("{}\nnot json at all\n{{\"id\":5}}\n", row(1, "ann")),
    );
    let (corpus, diag) = load_corpus(&path, &LoadOptions::default()).unwrap();
    assert_eq!(corpus.len(), 1);
    // The bare-id row parses but lacks assignee and timestamps.
    assert_eq!(diag.malformed, 1);
    assert_eq!(diag.missing_assignee, 1);
}

#[test]
fn malformed_threshold_fails_the_load() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "bad.jsonl",
        &format!("{}\ngarbage\nmore garbage\n", row(1, "ann")),
    );
    let opts = LoadOptions {
        max_skipped: Some(1),
        ..LoadOptions::default()
    };
    let err = load_corpus(&path, &opts).unwrap_err();
    assert!(err.to_string().contains("above the limit"));
}

#[test]
fn duplicate_ids_and_bad_priorities_are_counted() {
    let dir = TempDir::new().unwrap();
    let bad_priority = row(9, "cid").replace(r#""priority":"P2""#, r#""priority":"High""#);
    let path = write(
        dir.path(),
        "mix.jsonl",
        &format!("{}\n{}\n{}\n", row(1, "ann"), row(1, "bob"), bad_priority),
    );
    let (corpus, diag) = load_corpus(&path, &LoadOptions::default()).unwrap();
    assert_eq!(corpus.len(), 1);
    assert_eq!(diag.duplicate_id, 1);
    assert_eq!(diag.invalid_priority, 1);
}

#[test]
fn empty_optional_fields_become_the_missing_token() {
    let dir = TempDir::new().unwrap();
    let sparse = r#"{"id":7,"summary":"hang","assignee":"ann","created_at":"2012-03-01","modified_at":"2012-03-02"}"#;
    let path = write(dir.path(), "sparse.jsonl", &format!("{sparse}\n"));
    let (corpus, diag) = load_corpus(&path, &LoadOptions::default()).unwrap();
    assert_eq!(diag.skipped(), 0);
    let report = &corpus.reports()[0];
    assert_eq!(report.component, MISSING);
    assert_eq!(report.operating_system, MISSING);
    assert_eq!(report.priority, MISSING);
    assert_eq!(report.status, MISSING);
}

#[test]
fn window_excludes_out_of_range_reports() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "window.jsonl",
        &format!("{}\n{}\n", row(1, "ann"), row(2, "bob")),
    );
    let window = TimeWindow {
        start: parse_timestamp("2012-01-02T00:00:00Z").unwrap(),
        end: parse_timestamp("2012-01-04T00:00:00Z").unwrap(),
    };
    let opts = LoadOptions {
        window: Some(window),
        ..LoadOptions::default()
    };
    // Row 1 is created 2012-01-02, row 2 on 2012-01-03: both inside.
    let (corpus, diag) = load_corpus(&path, &opts).unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(diag.excluded_by_window, 0);

    let narrow = LoadOptions {
        window: Some(TimeWindow {
            start: Timestamp(0),
            end: parse_timestamp("2011-01-01").unwrap(),
        }),
        ..LoadOptions::default()
    };
    let (empty, diag) = load_corpus(&path, &narrow).unwrap();
    assert_eq!(empty.len(), 0);
    assert_eq!(diag.excluded_by_window, 2);
}

#[test]
fn jsonl_round_trip_is_an_equal_corpus() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "corpus.jsonl",
        &format!("{}\n{}\n{}\n", row(3, "bob"), row(1, "ann"), row(2, "ann")),
    );
    let (first, _) = load_corpus(&path, &LoadOptions::default()).unwrap();

    let other = TempDir::new().unwrap();
    let saved = other.path().join("corpus.jsonl");
    save_corpus(&first, &saved, CorpusFormat::Jsonl).unwrap();
    let (second, diag) = load_corpus(&saved, &LoadOptions::default()).unwrap();
    assert_eq!(diag.skipped(), 0);
    assert_eq!(first, second);
}

#[test]
fn csv_round_trip_is_an_equal_corpus() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "corpus.jsonl",
        &format!("{}\n{}\n", row(1, "ann"), row(2, "bob")),
    );
    let (first, _) = load_corpus(&path, &LoadOptions::default()).unwrap();

    let csv_path = dir.path().join("corpus.csv");
    save_corpus(&first, &csv_path, CorpusFormat::Csv).unwrap();
    let opts = LoadOptions {
        source_label: Some("corpus.jsonl".into()),
        ..LoadOptions::default()
    };
    let (second, diag) = load_corpus(&csv_path, &opts).unwrap();
    assert_eq!(diag.skipped(), 0);
    assert_eq!(first, second);
}

#[test]
fn csv_with_quoted_commas_parses() {
    let dir = TempDir::new().unwrap();
    let csv = "id,summary,component,op_sys,priority,severity,reporter,assignee,status,resolution,created_at,modified_at,product\n\
               5,\"crash, then hang\",editor,linux,P1,major,rep,ann,RESOLVED,FIXED,2012-02-01T00:00:00Z,2012-02-02T00:00:00Z,wb\n";
    let path = write(dir.path(), "quoted.csv", csv);
    let (corpus, diag) = load_corpus(&path, &LoadOptions::default()).unwrap();
    assert_eq!(diag.skipped(), 0);
    assert_eq!(corpus.reports()[0].summary, "crash, then hang");
}

#[test]
fn explicit_format_overrides_extension_inference() {
    let dir = TempDir::new().unwrap();
    // JSONL content behind a .txt name loads once the format is forced.
    let path = write(dir.path(), "corpus.txt", &format!("{}\n", row(1, "ann")));
    assert!(load_corpus(&path, &LoadOptions::default()).is_err());
    let opts = LoadOptions {
        format: Some(CorpusFormat::Jsonl),
        ..LoadOptions::default()
    };
    let (corpus, _) = load_corpus(&path, &opts).unwrap();
    assert_eq!(corpus.len(), 1);
}

#[test]
fn unreadable_file_is_a_hard_error() {
    let missing = Path::new("/nonexistent/nowhere.jsonl");
    assert!(load_corpus(missing, &LoadOptions::default()).is_err());
}

#[test]
fn timestamp_variants_parse() {
    for (text, expect) in [
        ("2012-12-22T03:01:00Z", 1356145260),
        ("2012-12-22T03:01:00+00:00", 1356145260),
        ("2012-12-22 03:01:00", 1356145260),
        ("2012-12-22T03:01:00", 1356145260),
        ("1970-01-01", 0),
    ] {
        assert_eq!(parse_timestamp(text), Some(Timestamp(expect)), "{text}");
    }
    assert_eq!(parse_timestamp("not a date"), None);
    assert_eq!(parse_timestamp(""), None);
}
