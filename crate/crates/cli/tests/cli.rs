use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn teamtalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamtalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, n_games: &str, n_puzzles: &str) -> std::path::PathBuf {
    let out = teamtalk(&["synth", "--out", s(dir), "--n-games", n_games, "--n-puzzles", n_puzzles, "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("corpus.jsonl")
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn synth_then_validate_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(&tmp.path().join("synth"), "60", "6");
    let out = teamtalk(&["validate", "--corpus", s(&corpus), "--out", s(&tmp.path().join("v"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("v/validation.json")).unwrap()).unwrap();
    assert_eq!(v["lines"], 60);
    assert!(v["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn corrupt_line_fails_validation_with_its_number() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(&tmp.path().join("synth"), "10", "2");
    let mut text = fs::read_to_string(&corpus).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.insert(3, "{\"game_id\": 5, not json");
    text = lines.join("\n");
    fs::write(&corpus, text).unwrap();
    let out = teamtalk(&["validate", "--corpus", s(&corpus)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(teamtalk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(teamtalk(&["score"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(&tmp.path().join("synth"), "10", "2");
    let out = teamtalk(&[
        "train", "--corpus", s(&corpus), "--out", s(&tmp.path().join("t")), "--train-frac", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = teamtalk(&["evaluate", "--corpus", s(&corpus), "--out", s(tmp.path()), "--objective", "zz"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_corpus_is_a_runtime_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = teamtalk(&["score", "--corpus", "/nonexistent.jsonl", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn score_and_analyze_write_stamped_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(&tmp.path().join("synth"), "60", "6");
    let out_dir = tmp.path().join("a");
    let out = teamtalk(&["score", "--corpus", s(&corpus), "--out", s(&out_dir)]);
    assert!(out.status.success());
    let out = teamtalk(&["analyze", "--corpus", s(&corpus), "--out", s(&out_dir), "--bins", "8", "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "scores.csv",
        "class_balance.csv",
        "ideas.csv",
        "convergence.csv",
        "score_profile.csv",
        "constructiveness_hist.csv",
    ] {
        let head = first_line(&out_dir.join(f));
        assert!(head.starts_with("# config=") && head.contains(" lexicons="), "{f}: {head}");
    }
    let scores = fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 62);
    let hist = fs::read_to_string(out_dir.join("constructiveness_hist.csv")).unwrap();
    let total: usize = hist
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 60);
    assert!(fs::read_to_string(out_dir.join("constructiveness_hist.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn identical_config_gives_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(&tmp.path().join("synth"), "60", "6");
    let run = |dir: &str| {
        let d = tmp.path().join(dir);
        let out = teamtalk(&["featurize", "--corpus", s(&corpus), "--out", s(&d), "--mode", "early20"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        d
    };
    let (a, b) = (run("one"), run("two"));
    for f in ["features.csv", "excluded.csv", "pos_vocabulary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(a.join("features.csv")).unwrap();
    let cols = header.lines().nth(1).unwrap();
    assert!(cols.starts_with("game_id,puzzle_id,base."));
    assert!(cols.contains(",pos."));
}

#[test]
fn train_evaluate_report_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = synth(&tmp.path().join("synth"), "80", "8");
    let model_dir = tmp.path().join("model");
    let common = |sub: &str, out: &Path| -> Vec<String> {
        [sub, "--corpus", s(&corpus), "--out", s(out), "--objective", "p", "--n-iter", "4", "--seed", "1"]
            .iter()
            .map(|x| x.to_string())
            .collect()
    };
    let args = common("train", &model_dir);
    let out = teamtalk(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(model_dir.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["groups"].as_array().unwrap().len(), 4);

    let eval_dir = tmp.path().join("eval");
    let mut args = common("evaluate", &eval_dir);
    args.extend(["--n-perm", "5", "--model", s(&model_dir.join("model.json"))].map(String::from));
    let out = teamtalk(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(eval_dir.join("eval_p_full.json")).unwrap()).unwrap();
    assert_eq!(reports.len(), 5);
    for r in &reports {
        let auc = r["mean_auc"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&auc));
        assert!(r["p_value"].as_f64().unwrap() > 0.0);
    }

    let report_dir = tmp.path().join("report");
    let out = teamtalk(&[
        "report",
        "--reports",
        s(&eval_dir.join("eval_p_full.json")),
        "--out",
        s(&report_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(report_dir.join("table.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[0].starts_with("# config="));
    assert_eq!(lines[1], "feature_set,PP full,PP early20,P full,P early20,MM full,MM early20");
    assert_eq!(lines.len(), 7);
    let labels: Vec<&str> = lines[2..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["Baseline", "Linguistic", "Interaction", "POS", "All"]);
    for l in &lines[2..] {
        let cells: Vec<&str> = l.split(',').collect();
        assert!(!cells[3].is_empty());
        assert!(cells[1].is_empty());
    }
    assert!(report_dir.join("table.md").exists());
}
