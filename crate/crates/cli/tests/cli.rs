use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chartcorpus"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn example_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus.example.toml")
}

fn generate(dir: &Path, seed: &str) -> PathBuf {
    let out = dir.join("corpus");
    let o = run(&[
        "generate",
        "--config",
        example_config().to_str().unwrap(),
        "--seed",
        seed,
        "--count-scale",
        "0.005",
        "--jobs",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn generate_validate_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let out = generate(tmp.path(), "5");
    let corpus = out.to_str().unwrap();

    let v = run(&["validate", corpus]);
    assert!(v.status.success(), "{}", stdout(&v));
    assert!(stdout(&v).contains(", 0 violations"));

    let s = run(&["stats", corpus]);
    assert!(s.status.success());
    let text = stdout(&s);
    assert!(text.contains("total"), "{text}");

    // Refuses to overwrite a populated directory.
    let again = run(&["generate", "--config", example_config().to_str().unwrap(), "--count-scale", "0.005", "--out", corpus]);
    assert_eq!(again.status.code(), Some(2));
}

#[test]
fn validate_flags_a_corrupted_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let out = generate(tmp.path(), "6");
    let meta = out.join("meta/000001.json");
    let text = std::fs::read_to_string(&meta).unwrap();
    std::fs::write(&meta, &text[..text.len() / 2]).unwrap();
    let v = run(&["validate", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("meta/000001.json"), "{}", stdout(&v));
}

#[test]
fn describe_and_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let out = generate(tmp.path(), "8");
    let meta = out.join("meta/000000.json");
    let meta = meta.to_str().unwrap();

    let d = run(&["describe", "--meta", meta, "--seed", "3"]);
    assert!(d.status.success());
    let lines: Vec<String> = stdout(&d).lines().map(String::from).collect();
    assert!(lines.first().unwrap().starts_with("M1"), "{lines:?}");
    assert!(lines.last().unwrap().starts_with("M5"), "{lines:?}");
    assert_eq!(stdout(&run(&["describe", "--meta", meta, "--seed", "3"])), stdout(&d));

    let j = run(&["describe", "--meta", meta, "--seed", "3", "--json"]);
    let rec: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(rec["image_index"], 0);

    let b = run(&["describe", "--meta", meta, "--seed", "3", "--baseline"]);
    assert!(b.status.success());

    let refs = out.join("descriptions/000000.txt");
    let hyp = tmp.path().join("hyp.jsonl");
    let first = std::fs::read_to_string(&refs).unwrap().lines().next().unwrap().to_string();
    std::fs::write(&hyp, format!("{first}\n")).unwrap();
    let report = tmp.path().join("report.json");
    let e = run(&[
        "eval",
        "--hyp",
        hyp.to_str().unwrap(),
        "--ref",
        refs.to_str().unwrap(),
        "--by-kind",
        out.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(e.status.success(), "{}", String::from_utf8_lossy(&e.stderr));
    assert!(stdout(&e).contains("overall"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let overall = r["rows"].as_array().unwrap().iter().find(|row| row["group"] == "overall").unwrap();
    // The hypothesis is one of its own references.
    assert!((overall["mean"]["bleu"].as_f64().unwrap() - 100.0).abs() < 1e-9, "{r}");
}

#[test]
fn catalog_and_bank_census() {
    let c = run(&["catalog", "stats", "--source", "synthetic(10, 5)", "--seed", "1"]);
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stderr));
    assert!(!stdout(&c).is_empty());
    let b = run(&["bank"]);
    assert!(b.status.success());
    assert!(stdout(&b).contains("M3"));
}

#[test]
fn bad_input_exits_with_two() {
    let o = run(&["describe", "--meta", "/nonexistent/meta.json", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}
