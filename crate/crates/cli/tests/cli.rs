mod common;

use std::fs;
use std::path::Path;

use common::{p, samkit, stdout, two_blob_fixture, write_labels};
use samkit::data::save_vectors;
use samkit::synthetic::shuffled;
use samkit::EmbeddingMatrix;

fn digest_all(paths: &[&Path]) -> Vec<Vec<u8>> {
    paths.iter().map(|x| fs::read(x).unwrap()).collect()
}

#[test]
fn sam_on_pure_blobs_and_shuffled_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (vectors, labels, raw) = two_blob_fixture(dir.path());
    let before = digest_all(&[&vectors, &labels]);
    let out = dir.path().join("pure");
    let o = samkit(&["sam", "--vectors", p(&vectors), "--labels", p(&labels), "--out", p(&out), "--svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pure: f64 = stdout(&o).parse().unwrap();
    assert!(pure >= 0.99, "{pure}");
    for f in ["alignment_curve.csv", "summary.json", "manifest.json", "alignment_curve.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join("alignment_curve.csv")).unwrap();
    assert!(csv.starts_with("k,a\n"));
    assert_eq!(csv.lines().count(), 31);
    assert_eq!(digest_all(&[&vectors, &labels]), before);

    let shuffled_path = dir.path().join("shuffled.tsv");
    write_labels(&shuffled_path, &shuffled(&raw, 5));
    let o = samkit(&[
        "sam", "--vectors", p(&vectors), "--labels", p(&shuffled_path), "--out", p(&dir.path().join("shuf")),
    ]);
    let noisy: f64 = stdout(&o).parse().unwrap();
    assert!(noisy < pure);
}

#[test]
fn missing_labels_is_an_io_error_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (vectors, _, _) = two_blob_fixture(dir.path());
    let out = dir.path().join("never");
    let o = samkit(&[
        "sam", "--vectors", p(&vectors), "--labels", p(&dir.path().join("absent.tsv")), "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn inconsistent_flags_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (vectors, labels, _) = two_blob_fixture(dir.path());
    let out = dir.path().join("x");
    let o = samkit(&["sam", "--vectors", p(&vectors), "--labels", p(&labels), "--mode", "target", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    let o = samkit(&[
        "sam", "--vectors", p(&vectors), "--labels", p(&labels), "--mode", "target", "--target", "zzz",
        "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
    assert_eq!(samkit(&["sam", "--bogus"]).status.code(), Some(3));

    let o = samkit(&[
        "sam", "--vectors", p(&vectors), "--labels", p(&labels), "--mode", "target", "--target", "a",
        "--k-min", "2", "--k-max", "10", "--grid", "full", "--out", p(&out),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("alignment_curve.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("2,"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn dbi_fixture_row() {
    let dir = tempfile::tempdir().unwrap();
    let m = EmbeddingMatrix::from_rows(&[[0.0f32, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]]).unwrap();
    let vectors = dir.path().join("four.samv");
    save_vectors(&vectors, &m).unwrap();
    let out = dir.path().join("dbi");
    let o = samkit(&["dbi", "--vectors", p(&vectors), "--out", p(&out), "--svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("dbi_curve.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("2,0.1"));
    assert!(out.join("dbi_curve.svg").exists());
}

#[test]
fn lc_rejects_oversized_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let (vectors, labels, _) = two_blob_fixture(dir.path());
    let config = dir.path().join("exp.json");
    fs::write(
        &config,
        r#"{"vectors": "blobs.samv", "labels": "blobs.labels.tsv", "budgets": [10, 500]}"#,
    )
    .unwrap();
    let _ = (vectors, labels);
    let o = samkit(&["lc", "--config", p(&config), "--out", p(&dir.path().join("lc"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget 500"));
}

#[test]
fn lc_writes_cells_curve_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    two_blob_fixture(dir.path());
    let config = dir.path().join("exp.json");
    fs::write(
        &config,
        r#"{"vectors": "blobs.samv", "labels": "blobs.labels.tsv", "budgets": [10, 20],
            "seeds": [0, 1, 2], "l2_grid": [0.01, 1.0], "test_fraction": 0.25,
            "representation": "blobs"}"#,
    )
    .unwrap();
    let out = dir.path().join("lc");
    let o = samkit(&["lc", "--config", p(&config), "--out", p(&out), "--svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cells = fs::read_to_string(out.join("cells.jsonl")).unwrap();
    assert_eq!(cells.lines().count(), 6);
    let first: serde_json::Value = serde_json::from_str(cells.lines().next().unwrap()).unwrap();
    for key in ["seed", "N", "chosen_l2", "cv_score", "test_score"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    let curve = fs::read_to_string(out.join("learning_curve.csv")).unwrap();
    assert!(curve.starts_with("N,mean,std\n10,"));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["metric"], "accuracy");
    assert_eq!(summary["representation"], "blobs");
    assert!(summary["alc"].as_f64().unwrap() > 0.9);
}

#[test]
fn bow_feeds_sam() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("docs.jsonl");
    let mut lines = String::new();
    for i in 0..12 {
        let (label, text) = if i % 2 == 0 { ("sport", "ball goal team match") } else { ("food", "bread soup salt") };
        lines.push_str(&format!("{{\"id\":\"d{i}\",\"label\":\"{label}\",\"text\":\"{text} extra{i}\"}}\n"));
    }
    fs::write(&input, lines).unwrap();
    let out = dir.path().join("bow.samv");
    let o = samkit(&["bow", "--input", p(&input), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let vocab = fs::read_to_string(dir.path().join("bow.vocab.txt")).unwrap();
    assert_eq!(vocab.lines().take(4).collect::<Vec<_>>(), ["ball", "goal", "team", "match"]);
    let labels = dir.path().join("bow.labels.tsv");
    assert!(fs::read_to_string(&labels).unwrap().starts_with("id\tlabel\nd0\tsport\n"));
    assert!(dir.path().join("bow.manifest.json").exists());

    let o = samkit(&["sam", "--vectors", p(&out), "--labels", p(&labels), "--out", p(&dir.path().join("s"))]);
    let sam: f64 = stdout(&o).parse().unwrap();
    assert!(sam > 0.9, "{sam}");

    let csv_out = dir.path().join("bow.csv");
    assert!(samkit(&["bow", "--input", p(&input), "--out", p(&csv_out)]).status.success());
    assert!(fs::read_to_string(&csv_out).unwrap().starts_with("id,v0,"));
    let o = samkit(&["sam", "--vectors", p(&csv_out), "--labels", p(&labels), "--out", p(&dir.path().join("c"))]);
    assert_eq!(stdout(&o).parse::<f64>().unwrap(), sam);
}

#[test]
fn correlate_needs_three_pairs() {
    let dir = tempfile::tempdir().unwrap();
    for (i, (sam, alc)) in [(0.5, 0.6), (0.7, 0.8)].iter().enumerate() {
        let d = dir.path().join(format!("r{i}"));
        fs::create_dir_all(&d).unwrap();
        fs::write(d.join("sam.json"), format!(r#"{{"kind":"sam","sam":{sam},"dataset":"x","representation":"r{i}"}}"#)).unwrap();
        fs::write(d.join("lc.json"), format!(r#"{{"kind":"lc","alc":{alc},"dataset":"x","representation":"r{i}"}}"#)).unwrap();
    }
    let glob = format!("{}/*/*.json", dir.path().display());
    let out = dir.path().join("corr");
    let o = samkit(&["correlate", "--summaries", &glob, "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
    let o = samkit(&["correlate", "--summaries", "/nonexistent/*.json", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rerun_detects_modified_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (vectors, labels, raw) = two_blob_fixture(dir.path());
    let out = dir.path().join("run");
    assert!(samkit(&["sam", "--vectors", p(&vectors), "--labels", p(&labels), "--out", p(&out)]).status.success());
    write_labels(&labels, &shuffled(&raw, 1));
    let o = samkit(&["rerun", "--manifest", p(&out.join("manifest.json")), "--out", p(&dir.path().join("again"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("changed"));
}
