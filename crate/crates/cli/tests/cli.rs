use std::path::Path;
use std::process::{Command, Output};

use sdn::io::{load_audio, read_curve, read_matrix_csv, write_audio, AudioBuffer};

fn sdn_cmd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run sdn")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "status {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const CONFIG: &str = r#"
seed = 3
duration = 0.4

[scene]
room_dims = [6.0, 4.0, 3.0]
source = { position = [1.0, 1.0, 1.5] }
mic = { position = [4.5, 2.5, 1.2] }
walls = { uniform = 0.35 }

[matrix]
kind = "isotropic"

[analysis]
bands = [500.0, 1000.0]
"#;

#[test]
fn render_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("room.toml"), CONFIG).unwrap();
    ok(&sdn_cmd(dir.path(), &["render", "--config", "room.toml", "--out", "a.wav"]));
    ok(&sdn_cmd(dir.path(), &["render", "--config", "room.toml", "--out", "b.wav"]));
    let a = std::fs::read(dir.path().join("a.wav")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.wav")).unwrap());
    let rir = load_audio(dir.path().join("a.wav")).unwrap();
    assert_eq!(rir.frames(), 17640);
}

#[test]
fn csv_render_and_direct_path_flag() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("room.toml"), CONFIG).unwrap();
    ok(&sdn_cmd(dir.path(), &["render", "--config", "room.toml", "--format", "csv", "--out", "with.csv"]));
    ok(&sdn_cmd(
        dir.path(),
        &["render", "--config", "room.toml", "--no-direct-path", "--out", "without.csv"],
    ));
    let with = read_curve(dir.path().join("with.csv")).unwrap();
    let without = read_curve(dir.path().join("without.csv")).unwrap();
    assert_eq!(with[0].0, "time_s");
    let d = ((3.5f64.powi(2) + 1.5f64.powi(2) + 0.3f64.powi(2)).sqrt() / 343.0 * 44100.0).floor() as usize;
    assert!(with[1].1[d] > 0.0);
    assert_eq!(without[1].1[d], 0.0);
}

#[test]
fn analyze_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("room.toml"), CONFIG).unwrap();
    ok(&sdn_cmd(dir.path(), &["render", "--config", "room.toml", "--duration", "1", "--out", "rir.wav"]));
    let text = ok(&sdn_cmd(
        dir.path(),
        &["analyze", "--input", "rir.wav", "--config", "room.toml", "--out", "curves"],
    ));
    assert!(text.contains("T60 0."), "{text}");
    let edc = read_curve(dir.path().join("curves/edc.csv")).unwrap();
    assert_eq!(edc[1].1[0], 0.0);
    let ned = std::fs::read_to_string(dir.path().join("curves/ned.csv")).unwrap();
    assert!(ned.starts_with("# window_s=0.02"));
    let bands = read_curve(dir.path().join("curves/bands.csv")).unwrap();
    assert_eq!(bands[0].0, "band_hz");
    assert_eq!(bands[0].1, vec![500.0, 1000.0]);
}

#[test]
fn convolve_appends_tail() {
    let dir = tempfile::tempdir().unwrap();
    let mut x = vec![0.0; 200];
    x[0] = 0.5;
    x[50] = -0.25;
    write_audio(dir.path().join("dry.wav"), &AudioBuffer::mono(x, 16000)).unwrap();
    ok(&sdn_cmd(dir.path(), &["convolve", "--input", "dry.wav", "--out", "wet.wav", "--tail", "0.1"]));
    let wet = load_audio(dir.path().join("wet.wav")).unwrap();
    assert_eq!(wet.sample_rate, 16000);
    assert_eq!(wet.frames(), 200 + 1600);
    let peak = wet.channels[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(peak > 0.0 && peak < 0.5);
}

#[test]
fn compare_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compare", "--trials", "3", "--jitter", "0.2", "--duration", "0.3", "--seed", "9"];
    let one = Command::new(env!("CARGO_BIN_EXE_sdn"))
        .current_dir(dir.path())
        .env("SDN_THREADS", "1")
        .args(args)
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_sdn"))
        .current_dir(dir.path())
        .env("SDN_THREADS", "3")
        .args(args)
        .output()
        .unwrap();
    let text = ok(&one);
    assert_eq!(text, ok(&many));
    assert!(text.contains("first-order max relative difference"));
    let rel: f64 = text.lines().last().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(rel < 1e-12);
}

#[test]
fn matrix_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    ok(&sdn_cmd(dir.path(), &["matrix", "construct", "--kind", "householder", "--admittance", "1,2,3,4", "--size", "4", "--out", "h.csv"]));
    let h = read_matrix_csv(dir.path().join("h.csv")).unwrap();
    assert_eq!(h.nrows(), 4);
    assert!(ok(&sdn_cmd(dir.path(), &["matrix", "verify", "--input", "h.csv"])).contains("lossless: yes"));
    std::fs::write(dir.path().join("bad.csv"), "1,1\n0,1\n").unwrap();
    let out = sdn_cmd(dir.path(), &["matrix", "verify", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(1));
    ok(&sdn_cmd(dir.path(), &["matrix", "nearest", "--input", "bad.csv", "--out", "q.csv"]));
    let q = read_matrix_csv(dir.path().join("q.csv")).unwrap();
    assert!((q.transpose() * &q - nalgebra::DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
}

#[test]
fn estimate_prints_reference_rates() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&sdn_cmd(dir.path(), &["estimate", "--out", "cost.csv"]));
    assert!(text.contains("14.60 MFLOPS"), "{text}");
    assert!(text.contains("14.86 MFLOPS"));
    let cost = read_curve(dir.path().join("cost.csv")).unwrap();
    assert_eq!(cost[0].1.len(), 9);
    let text = ok(&sdn_cmd(dir.path(), &["estimate", "--fs", "40000"]));
    assert!(text.contains("at most 173.7 kB"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sdn_cmd(dir.path(), &["render", "--matrix", "nope"]).status.code(), Some(1));
    assert_eq!(sdn_cmd(dir.path(), &["render", "--duration", "-1"]).status.code(), Some(1));
    std::fs::write(dir.path().join("bad.toml"), CONFIG.replace("[1.0, 1.0, 1.5]", "[7.0, 1.0, 1.5]")).unwrap();
    let out = sdn_cmd(dir.path(), &["render", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
    std::fs::write(dir.path().join("junk.wav"), b"RIFF0000WAVEjunk").unwrap();
    assert_eq!(sdn_cmd(dir.path(), &["analyze", "--input", "junk.wav"]).status.code(), Some(2));
    assert_eq!(sdn_cmd(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn shipped_config_renders() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/shoebox.toml");
    let dir = tempfile::tempdir().unwrap();
    ok(&sdn_cmd(dir.path(), &["render", "--config", cfg, "--duration", "0.2"]));
    assert_eq!(load_audio(dir.path().join("out/rir.wav")).unwrap().frames(), 8820);
}
