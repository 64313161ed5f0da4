use std::path::Path;

use tta_core::datasets::{gen_synthetic, read_dataset, write_dataset, SyntheticSpec};
use tta_core::experiment::{parse_config, run_experiment, run_repeats, TrainedModel};
use tta_core::tree::TraceTree;

fn idx_images(images: &[[u8; 16]]) -> Vec<u8> {
    let mut b = vec![0, 0, 8, 3];
    for v in [images.len() as u32, 4, 4] {
        b.extend(v.to_be_bytes());
    }
    images.iter().for_each(|img| b.extend(img));
    b
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut b = vec![0, 0, 8, 1];
    b.extend((labels.len() as u32).to_be_bytes());
    b.extend(labels);
    b
}

/// Bright top half for label 3, bright bottom half for label 7, label 5 is dropped.
fn write_idx(dir: &Path, prefix: &str, n: usize) {
    let mut imgs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let l = [3u8, 7, 5][i % 3];
        let mut img = [20u8; 16];
        let rows = if l == 3 { 0..2 } else { 2..4 };
        for r in rows {
            for c in 0..4 {
                img[r * 4 + c] = 200 + (i % 50) as u8;
            }
        }
        imgs.push(img);
        labels.push(l);
    }
    std::fs::write(dir.join(format!("{prefix}-images")), idx_images(&imgs)).unwrap();
    std::fs::write(dir.join(format!("{prefix}-labels")), idx_labels(&labels)).unwrap();
}

#[test]
fn idx_source_trains_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    write_idx(dir.path(), "train", 30);
    write_idx(dir.path(), "test", 12);
    let p = |f: &str| dir.path().join(f).display().to_string();
    let cfg = parse_config(&format!(
        r#"{{
            "dataset": {{"source": {{"kind": "idx", "train_images": "{}", "train_labels": "{}", "test_images": "{}", "test_labels": "{}", "resize": 2, "classes": [3, 7]}}}},
            "encoding": {{"kind": "amplitude"}},
            "ansatz": {{"n_qubits": 2, "layers": 2}},
            "train": {{"batch_size": 20, "learning_rate": 0.05, "max_epochs": 30}},
            "boost": {{"max_rounds": 3}},
            "method": "ovr"
        }}"#,
        p("train-images"),
        p("train-labels"),
        p("test-images"),
        p("test-labels")
    ))
    .unwrap();
    let (train, test, runs) = run_repeats(&cfg).unwrap();
    assert_eq!(train.states.len(), 20);
    assert_eq!(test.states.len(), 8);
    assert_eq!(train.n_classes, 2);
    assert!(runs[0].metrics.test_accuracy >= 0.75, "{:?}", runs[0].metrics);
}

#[test]
fn file_source_matches_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = gen_synthetic(&SyntheticSpec { dim: 2, n_classes: 3, per_class_train: 6, per_class_test: 3 }, 4).unwrap();
    write_dataset(&dir.path().join("train.txt"), &train).unwrap();
    write_dataset(&dir.path().join("test.txt"), &test).unwrap();
    let back = read_dataset(&dir.path().join("train.txt")).unwrap();
    assert_eq!(back.features(), train.features());
    assert_eq!(back.labels(), train.labels());

    let base = r#""encoding": {"kind": "angle"}, "ansatz": {"n_qubits": 2, "layers": 1}, "train": {"max_epochs": 3, "batch_size": 6}, "boost": {"max_rounds": 2}, "method": "tta""#;
    let from_files = parse_config(&format!(
        r#"{{"dataset": {{"source": {{"kind": "files", "train": "{}", "test": "{}"}}}}, {base}}}"#,
        dir.path().join("train.txt").display(),
        dir.path().join("test.txt").display()
    ))
    .unwrap();
    let generated = parse_config(&format!(
        r#"{{"dataset": {{"source": {{"kind": "synthetic", "dim": 2, "per_class_train": 6, "per_class_test": 3}}, "seed": 4}}, {base}}}"#
    ))
    .unwrap();
    let a = run_repeats(&from_files).unwrap().2;
    let b = run_repeats(&generated).unwrap().2;
    assert_eq!(a[0].model, b[0].model);
}

#[test]
fn saved_artifacts_reload() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(
        r#"{
            "dataset": {"source": {"kind": "annni", "n_qubits": 3, "per_class_train": 4, "per_class_test": 2}, "seed": 2},
            "encoding": {"kind": "raw_state"},
            "ansatz": {"n_qubits": 3, "layers": 1},
            "train": {"max_epochs": 3, "batch_size": 12},
            "boost": {"max_rounds": 3},
            "method": "tta"
        }"#,
    )
    .unwrap();
    run_experiment(&cfg, Some(dir.path())).unwrap();
    let run = dir.path().join("run_0");
    let model: TrainedModel = serde_json::from_str(&std::fs::read_to_string(run.join("model.json")).unwrap()).unwrap();
    let TrainedModel::Tta { tree } = model else { panic!("expected a tree") };
    let text = std::fs::read_to_string(run.join("tree.txt")).unwrap();
    let parsed = TraceTree::from_text(&text).unwrap();
    assert_eq!(parsed.nodes, tree.nodes);

    let rounds = std::fs::read_to_string(run.join("rounds.csv")).unwrap();
    let mut last: Option<(String, f64)> = None;
    for line in rounds.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let Ok(g) = cols[4].parse::<f64>() else { continue };
        if let Some((node, prev)) = &last {
            if node == cols[0] {
                assert!(g <= *prev);
            }
        }
        last = Some((cols[0].to_string(), g));
    }
    let coords = std::fs::read_to_string(dir.path().join("train_coords.csv")).unwrap();
    assert_eq!(coords.lines().count(), 13);
}
