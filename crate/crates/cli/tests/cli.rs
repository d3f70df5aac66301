//! End-to-end tests of the `ostce` binary: flags, exit codes, emitted
//! artifacts, and determinism across worker counts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ostce_cli::io::{load_png, save_png};
use ostce_core::synth;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ostce"))
}

fn fixtures_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "ostce-cli-{tag}-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn ostce");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    bin()
        .args(args)
        .output()
        .expect("spawn ostce")
        .status
        .code()
        .unwrap_or(-1)
}

#[test]
fn usage_errors_exit_one() {
    // Missing required inputs.
    assert_eq!(exit_code(&[]), 1);
    // Unknown flag.
    assert_eq!(exit_code(&["--frobnicate"]), 1);
    // Unknown method name.
    let virt = fixtures_root().join("virtual/hud.png");
    let bg = fixtures_root().join("backgrounds/bg01_yellow_wall.png");
    assert_eq!(
        exit_code(&[
            "--virtual",
            virt.to_str().unwrap(),
            "--background",
            bg.to_str().unwrap(),
            "--out",
            "/tmp/ostce-unused",
            "--method",
            "belief",
        ]),
        1
    );
    // Compare with fewer than two methods.
    assert_eq!(
        exit_code(&[
            "--virtual",
            virt.to_str().unwrap(),
            "--background",
            bg.to_str().unwrap(),
            "--out",
            "/tmp/ostce-unused",
            "--compare",
            "ours",
        ]),
        1
    );
}

#[test]
fn missing_input_exits_two_without_partial_outputs() {
    let out_dir = temp_dir("missing");
    let target = out_dir.join("results");
    let code = exit_code(&[
        "--virtual",
        "/nonexistent/virt.png",
        "--background",
        "/nonexistent/bg.png",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(
        !target.exists(),
        "failed run must not leave partial outputs"
    );
    std::fs::remove_dir_all(&out_dir).ok();
}

#[test]
fn invalid_parameters_exit_three() {
    let virt = fixtures_root().join("virtual/hud.png");
    let bg = fixtures_root().join("backgrounds/bg01_yellow_wall.png");
    let base = [
        "--virtual",
        virt.to_str().unwrap(),
        "--background",
        bg.to_str().unwrap(),
        "--out",
        "/tmp/ostce-unused",
    ];
    fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
        let mut v = base.to_vec();
        v.extend_from_slice(extra);
        v
    }
    assert_eq!(exit_code(&with(&base, &["--lambda-e", "3.0"])), 3);
    assert_eq!(exit_code(&with(&base, &["--attenuation", "1.5"])), 3);
    assert_eq!(exit_code(&with(&base, &["--blur-kernel", "4"])), 3);
    assert_eq!(exit_code(&with(&base, &["--blur-sigma", "0"])), 3);
    assert_eq!(exit_code(&with(&base, &["--fov", "-1,1,0,0"])), 3);
}

#[test]
fn default_run_emits_full_artifact_set() {
    let out_dir = temp_dir("defaults");
    let virt = fixtures_root().join("virtual/hud.png");
    let bg = fixtures_root().join("backgrounds/bg01_yellow_wall.png");
    run_ok(&[
        "--virtual",
        virt.to_str().unwrap(),
        "--background",
        bg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--emit-overlay",
    ]);

    for name in ["enhanced.png", "blend.png", "overlay.png"] {
        let path = out_dir.join(name);
        assert!(path.exists(), "missing {name}");
        // Every emitted image must be readable back by the tool.
        let img = load_png(&path).unwrap();
        assert_eq!((img.width(), img.height()), (96, 64), "{name}");
    }

    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("metrics.json")).unwrap())
            .unwrap();
    assert_eq!(metrics["method"], "ours");
    assert!(metrics["foreground_pixel_count"].as_u64().unwrap() > 0);
    assert!(metrics["enhanced_percent"].as_f64().unwrap() >= 0.0);
    assert!(metrics["timing_ms"]["enhance"].as_f64().unwrap() >= 0.0);

    std::fs::remove_dir_all(&out_dir).ok();
}

#[test]
fn overlay_only_written_when_requested() {
    let out_dir = temp_dir("no-overlay");
    let virt = fixtures_root().join("virtual/shapes.png");
    let bg = fixtures_root().join("backgrounds/bg02_blue_wall.png");
    run_ok(&[
        "--virtual",
        virt.to_str().unwrap(),
        "--background",
        bg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out_dir.join("enhanced.png").exists());
    assert!(!out_dir.join("overlay.png").exists());
    std::fs::remove_dir_all(&out_dir).ok();
}

#[test]
fn frame_directory_processed_lexicographically() {
    let work = temp_dir("frames");
    let frames_dir = work.join("frames");
    std::fs::create_dir_all(&frames_dir).unwrap();
    save_png(&frames_dir.join("f002.png"), &synth::noise(32, 24, 2)).unwrap();
    save_png(&frames_dir.join("f001.png"), &synth::noise(32, 24, 1)).unwrap();

    let virt_path = work.join("virt.png");
    save_png(&virt_path, &synth::hud_panel(32, 24)).unwrap();

    let out_dir = work.join("out");
    run_ok(&[
        "--virtual",
        virt_path.to_str().unwrap(),
        "--background",
        frames_dir.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);

    assert!(out_dir.join("f001_enhanced.png").exists());
    assert!(out_dir.join("f002_enhanced.png").exists());
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("metrics.json")).unwrap())
            .unwrap();
    let arr = metrics.as_array().expect("array of per-frame reports");
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["frame"], "f001");
    assert_eq!(arr[1]["frame"], "f002");

    std::fs::remove_dir_all(&work).ok();
}

#[test]
fn config_file_applies_and_flags_win() {
    let work = temp_dir("config");
    let virt_path = work.join("virt.png");
    save_png(&virt_path, &synth::hud_panel(32, 24)).unwrap();
    let bg_path = work.join("bg.png");
    save_png(&bg_path, &synth::fixture_backgrounds(32, 24)[0].1).unwrap();

    // Config disables the enhancement entirely.
    let cfg_path = work.join("run.cfg");
    std::fs::write(
        &cfg_path,
        format!(
            "virtual = {}\nbackground = {}\nlambda-e = 0\nfov = 1,1,0,0\n",
            virt_path.display(),
            bg_path.display()
        ),
    )
    .unwrap();

    let out_a = work.join("out_a");
    run_ok(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("metrics.json")).unwrap())
            .unwrap();
    assert_eq!(
        m["enhanced_percent"].as_f64().unwrap(),
        0.0,
        "lambda 0 from config"
    );

    // The flag overrides the config and enhancement kicks in.
    let out_b = work.join("out_b");
    run_ok(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "--lambda-e",
        "0.4",
        "--out",
        out_b.to_str().unwrap(),
    ]);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_b.join("metrics.json")).unwrap())
            .unwrap();
    assert!(
        m["enhanced_percent"].as_f64().unwrap() > 0.0,
        "flag must win"
    );

    std::fs::remove_dir_all(&work).ok();
}

#[test]
fn compare_emits_grid_and_ranking() {
    let out_dir = temp_dir("compare");
    let virt = fixtures_root().join("virtual/hud.png");
    let bg = fixtures_root().join("backgrounds/bg03_green_hedge.png");
    run_ok(&[
        "--virtual",
        virt.to_str().unwrap(),
        "--background",
        bg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--compare",
        "ours,subtract,none",
    ]);

    assert!(out_dir.join("compare.png").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("compare.json")).unwrap())
            .unwrap();
    assert_eq!(report["methods"].as_array().unwrap().len(), 3);
    assert_eq!(report["ranking"].as_array().unwrap().len(), 3);

    std::fs::remove_dir_all(&out_dir).ok();
}

#[test]
fn identical_methods_report_identical_metrics() {
    let out_dir = temp_dir("self-compare");
    let virt = fixtures_root().join("virtual/hud.png");
    let bg = fixtures_root().join("backgrounds/bg04_red_brick.png");
    run_ok(&[
        "--virtual",
        virt.to_str().unwrap(),
        "--background",
        bg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--compare",
        "ours,ours",
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("compare.json")).unwrap())
            .unwrap();
    let methods = report["methods"].as_array().unwrap();
    let mut a = methods[0].clone();
    let mut b = methods[1].clone();
    a.as_object_mut().unwrap().remove("timing_ms");
    b.as_object_mut().unwrap().remove("timing_ms");
    assert_eq!(a, b);
    std::fs::remove_dir_all(&out_dir).ok();
}

#[test]
fn output_is_bit_identical_across_worker_counts() {
    let virt = fixtures_root().join("virtual/hud.png");
    let bg = fixtures_root().join("backgrounds/bg07_sky_gradient.png");

    let mut digests = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = temp_dir(&format!("threads-{threads}"));
        let out = bin()
            .args([
                "--virtual",
                virt.to_str().unwrap(),
                "--background",
                bg.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
                "--emit-overlay",
            ])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .expect("spawn ostce");
        assert!(out.status.success());

        let mut snapshot = Vec::new();
        for name in ["enhanced.png", "blend.png", "overlay.png"] {
            snapshot.push(std::fs::read(out_dir.join(name)).unwrap());
        }
        let mut metrics: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("metrics.json")).unwrap())
                .unwrap();
        metrics.as_object_mut().unwrap().remove("timing_ms");
        snapshot.push(serde_json::to_vec(&metrics).unwrap());
        digests.push(snapshot);
        std::fs::remove_dir_all(&out_dir).ok();
    }
    assert_eq!(
        digests[0], digests[1],
        "outputs differ across thread counts"
    );
}
