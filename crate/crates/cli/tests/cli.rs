use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn vsheet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsheet"))
        .current_dir(dir)
        .env_remove("VSHEET_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = walk(dir);
    files.sort();
    files
}

fn walk(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push((path.display().to_string(), std::fs::read(&path).unwrap()));
        }
    }
    out
}

#[test]
fn stability_map_brackets_sqrt2() {
    let tmp = TempDir::new().unwrap();
    let out = vsheet(tmp.path(), &["--out", "o", "stability-map"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut reader = csv::Reader::from_path(tmp.path().join("o/stability_map.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["M", "X1sq", "X1", "X2sq", "Y2", "a_over_eta2", "ratioSq", "coefLower", "coefValue", "coefUpper"]
    );
    let rows: Vec<(f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 191);
    let sqrt2 = 2f64.sqrt();
    let crossing = rows.windows(2).find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0).unwrap();
    assert!(crossing[0].0 < sqrt2 && sqrt2 < crossing[1].0);
    assert!(crossing[1].0 - crossing[0].0 <= 0.01 + 1e-12);
    assert!(rows.iter().all(|&(m, x)| (m < sqrt2) == (x > 0.0)));
}

#[test]
fn csv_roundtrips_exactly() {
    let tmp = TempDir::new().unwrap();
    vsheet(tmp.path(), &["--out", "o", "roots", "--mach", "1"]);
    let mut reader = csv::Reader::from_path(tmp.path().join("o/roots.csv")).unwrap();
    let row = reader.records().next().unwrap().unwrap();
    let x1_sq: f64 = row[1].parse().unwrap();
    // rationalised closed form at M = 1: 1 / (sqrt5 + 2)
    assert_eq!(x1_sq, 1.0 / (5f64.sqrt() + 2.0));
    let x1: f64 = row[2].parse().unwrap();
    assert_eq!(format!("{x1:.16e}"), &row[2]);
}

#[test]
fn verify_passes_and_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let first = vsheet(tmp.path(), &["--out", "o", "illposed"]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let before = listing(tmp.path());
    let out = vsheet(tmp.path(), &["--out", "o", "verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().count() >= 8);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
    assert_eq!(before, listing(tmp.path()));
}

#[test]
fn negative_sound_speed_in_config_is_rejected() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("bad.toml"), "sound_speed = -1.0\nmach = 1.0\n").unwrap();
    let out = vsheet(tmp.path(), &["--config", "bad.toml", "--out", "o", "roots"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("sound_speed"), "{}", stderr(&out));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("bad.toml"), "sound_sped = 1.0\n").unwrap();
    let out = vsheet(tmp.path(), &["--config", "bad.toml", "roots"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("sound_sped"), "{}", stderr(&out));
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("run.toml"), "mach = 0.5\nformat = \"json\"\n").unwrap();
    let out = vsheet(tmp.path(), &["--config", "run.toml", "--mach", "1.0", "--out", "o", "roots"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("o/roots.json")).unwrap()).unwrap();
    assert_eq!(doc["mach"], 1.0);
}

#[test]
fn env_sets_output_dir() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vsheet"))
        .current_dir(tmp.path())
        .env("VSHEET_OUT_DIR", "from_env")
        .args(["roots"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(tmp.path().join("from_env/roots.csv").exists());
}

#[test]
fn supercritical_mode_is_invalid() {
    let tmp = TempDir::new().unwrap();
    let out = vsheet(tmp.path(), &["--mach", "1.5", "mode"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("1.5"));
}

#[test]
fn bad_flags_exit_one() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&vsheet(tmp.path(), &["nonsense"])), 1);
    assert_eq!(code(&vsheet(tmp.path(), &["--mach", "abc", "roots"])), 1);
    assert_eq!(code(&vsheet(tmp.path(), &["--k", "2", "illposed"])), 1);
    assert_eq!(code(&vsheet(tmp.path(), &["--help"])), 0);
}

#[test]
fn oversized_step_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = vsheet(tmp.path(), &["--grid-n", "256", "--dt", "1.0", "evolve"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(
        tmp.path().join("run.toml"),
        "mach = 0.8\neta = 2.0\nband_max = 20\ngrid_n = 256\ngrid_l = 20.0\nt_end = 1.0\n",
    )
    .unwrap();
    for dir in ["a", "b"] {
        for cmd in ["stability-map", "roots", "mode", "illposed", "evolve"] {
            let out = vsheet(tmp.path(), &["--config", "run.toml", "--out", dir, cmd]);
            assert_eq!(code(&out), 0, "{cmd}: {}", stderr(&out));
        }
    }
    let a = listing(&tmp.path().join("a"));
    let b = listing(&tmp.path().join("b"));
    assert_eq!(a.len(), 7);
    for ((pa, ba), (pb, bb)) in a.iter().zip(&b) {
        assert_eq!(Path::new(pa).file_name(), Path::new(pb).file_name());
        assert!(ba == bb, "{pa} differs");
    }
}

#[test]
fn evolve_summary_matches_growth_rate() {
    let tmp = TempDir::new().unwrap();
    let out = vsheet(
        tmp.path(),
        &["--out", "o", "--grid-n", "512", "--t-end", "3", "--format", "csv", "evolve"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("o/evolve_summary.json")).unwrap()).unwrap();
    let rate = doc["analytic_rate"].as_f64().unwrap();
    assert!((rate - (5f64.sqrt() - 2.0).sqrt()).abs() < 1e-14);
    assert!(doc["relative_error"].as_f64().unwrap() < 0.02);
    let mut reader = csv::Reader::from_path(tmp.path().join("o/evolve.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["time", "log_norm", "front_re", "front_im", "energy_residual"]
    );
}
