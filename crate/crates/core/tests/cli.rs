use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dicke_otto::cycle::run_cycle;
use dicke_otto::sweep::{load_json, Config};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dicke-otto"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}\t")))
        .and_then(|v| v.split('\t').next())
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .parse()
        .unwrap()
}

const SMALL_SWEEP: &str = r#"
[model]
n_qubits = 2
n_tr = 15

[cycle]
kind = "frequency_scaling"
omega_hot = 2.0
omega_cold = 1.0
lambda = 0.0
t_hot = 0.5
t_cold = 0.1

[sweep]
outputs = ["regime", "work", "eta"]

[[sweep.axes]]
name = "lambda"
min = 0.0
max = 1.5
count = 4

[[sweep.axes]]
name = "t_hot"
min = 0.15
max = 1.0
count = 3
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn uncoupled_spectrum_is_a_ladder() {
    let o = run(&["spectrum", "--n-qubits", "1", "--ntr", "4", "--levels", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let energies: Vec<f64> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    let mut expected: Vec<f64> = (0..=4).flat_map(|n| [n as f64 - 0.5, n as f64 + 0.5]).collect();
    expected.sort_by(f64::total_cmp);
    assert_eq!(energies.len(), 10);
    for (e, x) in energies.iter().zip(&expected) {
        assert!((e - x).abs() < 1e-12, "{e} vs {x}");
    }
}

#[test]
fn cycle_matches_library_call() {
    let path = config("fig3_point.toml");
    let o = run(&["cycle", "--config", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let proto = Config::load(&path).unwrap().protocol().unwrap().unwrap();
    let r = run_cycle(&proto).unwrap();
    for (key, value) in [("work", r.work), ("q_hot", r.q_hot), ("q_cold", r.q_cold)] {
        assert!((field(&text, key) - value).abs() <= 1e-12 * value.abs().max(1.0));
    }
    assert!(text.contains(&format!("regime\t{}", r.regime)));
}

#[test]
fn correlate_reports_negativity() {
    let o = run(&["correlate", "--n-qubits", "2", "--lambda", "1.0", "--temperature", "0.1", "--ntr", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(field(&stdout(&o), "negativity") > 0.0);
}

#[test]
fn sweep_outputs_are_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_SWEEP);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 13);
    assert!(text.starts_with("lambda,t_hot,regime,work,eta,n_tr,flags,error\n"));
}

#[test]
fn sweep_json_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_SWEEP);
    let out = dir.path().join("grid.json");
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let grid = load_json(&out).unwrap();
    assert_eq!(grid.cells.len(), 12);
    assert!(grid.complete);
    assert_eq!(grid.provenance.config.sweep.as_ref().unwrap().axes.len(), 2);
}

#[test]
fn phase_diagram_fills_default_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_SWEEP.replace("outputs = [\"regime\", \"work\", \"eta\"]\n", "");
    let cfg = write(dir.path(), "map.toml", &text);
    let out = dir.path().join("map.csv");
    let o = run(&["phase-diagram", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let header = std::fs::read_to_string(&out).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "lambda,t_hot,regime,work,q_hot,q_cold,eta,cop,n_tr,flags,error");
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &SMALL_SWEEP.replace("t_cold = 0.1", "t_cold = 0.1\ntcold = 0.1"));
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tcold"), "{}", stderr(&o));

    let cfg = write(dir.path(), "axis.toml", &SMALL_SWEEP.replace("name = \"t_hot\"", "name = \"t_warm\""));
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep.axes[1].name"), "{}", stderr(&o));
}

#[test]
fn io_failures_exit_with_four() {
    let o = run(&["cycle", "--config", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL_SWEEP);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn numerical_failures_exit_with_three() {
    let o = run(&["spectrum", "--n-qubits", "8", "--lambda", "3", "--ntr", "1", "--auto-converge", "--method", "bare"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("did not converge"), "{}", stderr(&o));
}

#[test]
fn rate_equation_cycle_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "rates.toml",
        "[cycle]\nkind = \"frequency_scaling\"\nomega_hot = 2.0\nomega_cold = 1.0\nlambda = 0.5\nt_hot = 0.5\nt_cold = 0.1\npopulations = \"rate_equation\"\n",
    );
    let o = run(&["cycle", "--config", cfg.to_str().unwrap(), "--ntr", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let sum = field(&text, "q_hot") + field(&text, "q_cold");
    assert!((field(&text, "work") - sum).abs() < 1e-12);
}
