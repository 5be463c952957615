use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FIGURE_SETTING: &str = "drive = \"cos\"\n\n[model]\nomega0 = 1.0\nchi = 0.25\nalpha = 3.0\n";

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("scenario.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_kerrsim"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn body(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let text = body(path);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(k).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn empty_config_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "", &["simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("model.omega0") && err.contains("drive"),
        "{err}"
    );
}

#[test]
fn invalid_physics_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let text = FIGURE_SETTING.replace("chi = 0.25", "chi = 0.25\nk = 0.6");
    let out = run(dir.path(), &text, &["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.k"));
}

#[test]
fn bad_override_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), FIGURE_SETTING, &["spectrum", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), FIGURE_SETTING, &["oracle", "--trunc", "8"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial state"));
}

#[test]
fn variances_reproduce_the_squeezing_curves() {
    let dir = TempDir::new().unwrap();
    let text = format!("{FIGURE_SETTING}\n[kerr]\nbeta = 0.5\n");
    let out = run(dir.path(), &text, &["variances"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let file = dir.path().join("out/variances.csv");
    let header = fs::read_to_string(&file).unwrap();
    assert!(header.starts_with("# generator: kerrsim"));
    assert!(header.contains("#   beta = [0.5, 0.0]"));
    let xi = column(&file, "xi");
    let q = column(&file, "ratio_q");
    assert_eq!(xi.len(), 1001);
    assert!((q[0] - 1.0).abs() < 1e-12);
    assert!(q.iter().copied().fold(f64::INFINITY, f64::min) < 1.0);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let text = format!("{FIGURE_SETTING}\n[time]\nt_end = 3.0\nsamples_per_period = 200\n");
    let first = run(dir.path(), &text, &["simulate"]);
    assert_eq!(first.status.code(), Some(0));
    let a = body(&dir.path().join("out/simulate.csv"));
    let second = run(dir.path(), &text, &["simulate"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(a, body(&dir.path().join("out/simulate.csv")));
    let norms = column(&dir.path().join("out/simulate.csv"), "norm");
    assert!(norms.iter().all(|n| (n - 1.0).abs() < 1e-9));
}

#[test]
fn autocorr_scan_writes_one_file_per_kerr_constant() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "{FIGURE_SETTING}\n[time]\nt_end = 12.0\nsamples_per_period = 400\n\n[autocorr]\nchi_values = [0.0, 0.25, 1.0]\n"
    );
    let out = run(dir.path(), &text, &["autocorr"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for chi in ["0", "0.25", "1"] {
        let file = dir.path().join(format!("out/autocorr_chi{chi}.csv"));
        let f2 = column(&file, "abs_f2");
        assert!((f2[0] - 1.0).abs() < 1e-12);
        assert!(fs::read_to_string(&file).unwrap().contains("# revivals:"));
    }
}

#[test]
fn husimi_writes_grid_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let text = format!("{FIGURE_SETTING}\n[grid]\nresolution = 41\ntaus = [0.0]\n");
    let out = run(dir.path(), &text, &["husimi", "--format", "json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let grid: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/husimi_0.json")).unwrap())
            .unwrap();
    assert_eq!(grid["columns"], serde_json::json!(["x", "y", "Q"]));
    assert_eq!(grid["rows"].as_array().unwrap().len(), 41 * 41);
    let meta: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("out/husimi_0.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["peaks"].as_array().unwrap().len(), 1);
    assert!((meta["mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(meta["tau"].as_f64(), Some(0.0));
}

#[test]
fn emitted_configuration_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), FIGURE_SETTING, &["spectrum"]);
    assert_eq!(out.status.code(), Some(0));
    let file = dir.path().join("out/spectrum.csv");
    let text = fs::read_to_string(&file).unwrap();
    let emitted: String = text
        .lines()
        .skip_while(|l| *l != "# config:")
        .skip(1)
        .take_while(|l| l.starts_with('#'))
        .map(|l| {
            l.strip_prefix("#   ")
                .or(l.strip_prefix('#'))
                .unwrap()
                .to_string()
                + "\n"
        })
        .collect();
    let again = TempDir::new().unwrap();
    let rerun = run(again.path(), &emitted, &["spectrum"]);
    assert_eq!(
        rerun.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&rerun.stderr)
    );
    assert_eq!(body(&file), body(&again.path().join("out/spectrum.csv")));
    let levels = column(&file, "n");
    assert_eq!(levels.len(), 6 * 101);
}

#[test]
fn timemap_with_exponential_mass() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "{FIGURE_SETTING}\n[mass]\nkind = \"exponential\"\nm0 = 1.0\ngamma = 0.3\n\n[timemap]\nt_end = 2.0\nsamples = 5\nalpha = 1.0\n"
    );
    let out = run(
        dir.path(),
        &text,
        &["timemap", "--tol", "1e-12", "--trunc", "40"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let file = dir.path().join("out/timemap.csv");
    let tau = column(&file, "tau");
    assert!((tau[4] - (1.0 - (-0.6f64).exp()) / 0.3).abs() < 1e-12);
    assert!(column(&file, "fidelity").iter().all(|f| *f > 1.0 - 1e-8));
}
