//! End-to-end tests of the `mlstc` binary: subcommand round trips and the
//! documented exit codes (2 config, 3 data, 4 numerical).

use std::path::Path;
use std::process::Command;

use mlstc::data::{generate, write_fvecs, SyntheticSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mlstc"))
}

#[test]
fn train_encode_decode_inspect_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.mlstc");
    let codes = dir.path().join("codes.stc");
    let recon = dir.path().join("recon.fvecs");
    let input = dir.path().join("input.fvecs");

    let d = generate(&SyntheticSpec::ar1(16, 2000, 200, 0.5, 5)).unwrap();
    write_fvecs(&input, &d.test).unwrap();

    let st = bin()
        .args(["train", "--method", "ml-stc", "--source", "ar1", "--dim", "16"])
        .args(["--train-count", "2000", "--test-count", "10", "--rho", "0.5"])
        .args(["--data-seed", "5", "--layer-rate", "0.4", "--layers", "3"])
        .arg("--out")
        .arg(&model)
        .status()
        .unwrap();
    assert!(st.success());

    let out = bin().arg("inspect-model").arg("--model").arg(&model).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("kind: ml-stc"));
    assert!(text.contains("layers: 3"));

    let st = bin()
        .arg("encode")
        .arg("--model")
        .arg(&model)
        .arg("--input")
        .arg(&input)
        .arg("--out")
        .arg(&codes)
        .status()
        .unwrap();
    assert!(st.success());

    let st = bin()
        .arg("decode")
        .arg("--model")
        .arg(&model)
        .arg("--codes")
        .arg(&codes)
        .arg("--out")
        .arg(&recon)
        .status()
        .unwrap();
    assert!(st.success());

    // The reconstruction is a valid fvecs set of the right shape and is
    // closer to the data than coding by zero.
    let back = mlstc::data::load_fvecs(&recon, None).unwrap();
    assert_eq!(back.dim(), 16);
    assert_eq!(back.len(), 200);
    let dist = mlstc::metrics::measure_distortion(&d.test, &back).unwrap();
    assert!(dist < 0.6, "reconstruction too poor: {dist}");

    // Prefix decode works through the CLI too.
    let st = bin()
        .arg("decode")
        .arg("--model")
        .arg(&model)
        .arg("--codes")
        .arg(&codes)
        .args(["--up-to", "1"])
        .arg("--out")
        .arg(&recon)
        .status()
        .unwrap();
    assert!(st.success());
}

#[test]
fn baseline_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.pcah");
    let codes = dir.path().join("codes.binc");
    let recon = dir.path().join("recon.fvecs");
    let input = dir.path().join("input.fvecs");

    let d = generate(&SyntheticSpec::iid(8, 1000, 100, 6)).unwrap();
    write_fvecs(&input, &d.test).unwrap();

    assert!(bin()
        .args(["train", "--method", "pca-hash", "--source", "iid", "--dim", "8"])
        .args(["--train-count", "1000", "--test-count", "10", "--data-seed", "6"])
        .args(["--bits", "6"])
        .arg("--out")
        .arg(&model)
        .status()
        .unwrap()
        .success());
    assert!(bin()
        .arg("encode")
        .arg("--model")
        .arg(&model)
        .arg("--input")
        .arg(&input)
        .arg("--out")
        .arg(&codes)
        .status()
        .unwrap()
        .success());
    assert!(bin()
        .arg("decode")
        .arg("--model")
        .arg(&model)
        .arg("--codes")
        .arg(&codes)
        .arg("--out")
        .arg(&recon)
        .status()
        .unwrap()
        .success());
    let back = mlstc::data::load_fvecs(&recon, None).unwrap();
    assert_eq!((back.dim(), back.len()), (8, 100));

    // --up-to has no meaning for dense binary codes.
    let st = bin()
        .arg("decode")
        .arg("--model")
        .arg(&model)
        .arg("--codes")
        .arg(&codes)
        .args(["--up-to", "1"])
        .arg("--out")
        .arg(&recon)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");

    // Missing source specification.
    let st = bin()
        .args(["sweep", "--rate-grid", "0.5"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    // Unreachable rate for a single shared threshold.
    let st = bin()
        .args(["sweep", "--source", "ar1", "--dim", "8", "--rho", "0.9"])
        .args(["--train-count", "400", "--test-count", "100"])
        .args(["--methods", "stc", "--rate-grid", "1.58"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    // Empty method list in a JSON config.
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"source":{"type":"synthetic","kind":"iid","dim":4,"train_count":100,"test_count":20},
            "methods":[],"rate_grid":[0.5]}"#,
    )
    .unwrap();
    let st = bin()
        .arg("sweep")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");

    // Missing idx files.
    let st = bin()
        .args(["sweep", "--source", "idx"])
        .args(["--train-images", "/nonexistent/train", "--test-images", "/nonexistent/test"])
        .args(["--methods", "stc", "--rate-grid", "0.5"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));

    // A model file with a corrupt magic.
    let junk = dir.path().join("junk.model");
    std::fs::write(&junk, b"JUNKJUNKJUNK").unwrap();
    let st = bin()
        .arg("inspect-model")
        .arg("--model")
        .arg(&junk)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn sweep_json_config_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out_flags = dir.path().join("flags.csv");
    let out_json = dir.path().join("json.csv");
    let cfg = dir.path().join("cfg.json");

    assert!(bin()
        .args(["sweep", "--source", "iid", "--dim", "12"])
        .args(["--train-count", "800", "--test-count", "200", "--data-seed", "3"])
        .args(["--methods", "stc,lsh", "--rate-grid", "0.5,1.0", "--seed", "9"])
        .arg("--out")
        .arg(&out_flags)
        .status()
        .unwrap()
        .success());

    std::fs::write(
        &cfg,
        r#"{
  "source": {"type": "synthetic", "kind": "iid", "dim": 12,
             "train_count": 800, "test_count": 200, "seed": 3},
  "methods": ["stc", "lsh"],
  "rate_grid": [0.5, 1.0],
  "seed": 9
}"#,
    )
    .unwrap();
    assert!(bin()
        .arg("sweep")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_json)
        .status()
        .unwrap()
        .success());

    assert_eq!(
        std::fs::read(&out_flags).unwrap(),
        std::fs::read(&out_json).unwrap()
    );
    // The sidecar reproduces the full config.
    assert!(Path::new(&out_json.with_extension("config.json")).exists());
}

#[test]
fn alloc_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("alloc.csv");
    assert!(bin()
        .args(["alloc-report", "--source", "ar1", "--dim", "10", "--rho", "0.9"])
        .args(["--train-count", "2000", "--test-count", "10", "--lambda", "1.0"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "dim,sigma_sq,stc_rate,stc_distortion,wf_rate,wf_distortion");
    assert_eq!(lines.len(), 11);
}
