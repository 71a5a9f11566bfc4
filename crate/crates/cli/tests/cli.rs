use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn holoww(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holoww")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const REST: &str = r#"
[physics]
depth = 1.0
initial = { kind = "rest" }

[numerics]
n = 32
length = 6.283185307179586
dt = { fixed = 0.05 }
t_end = 0.5
cadence = 2

[diagnostics]
densities = true
qm_check = true
local_energy = true
"#;

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"), "metadata line");
    lines.next().unwrap();
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn rest_state_gives_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rest.toml", REST);
    let o = holoww(&["simulate", "--config", "rest.toml", "--out", "run", "--strict"], dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let run = dir.path().join("run");
    for row in data_rows(&run.join("invariants.csv")) {
        assert!(row[1..].iter().all(|v| *v == 0.0), "{row:?}");
    }
    for row in data_rows(&run.join("moments.csv")) {
        assert!(row[2..].iter().all(|v| v.abs() < 1e-14), "{row:?}");
    }
    for row in data_rows(&run.join("snapshots.csv")) {
        assert!(row[3..].iter().all(|v| *v == 0.0));
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("verdicts.json")).unwrap()).unwrap();
    assert_eq!(v["metadata"]["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["report"]["config"]["numerics"]["model"], "nonlinear");
    assert!(v["report"]["verdicts"].as_array().unwrap().iter().all(|x| x["pass"] == true));
}

#[test]
fn linear_mode_reports_dispersion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[physics]
depth = 1.0
initial = { kind = "mode", k = 2, amplitude = 0.01 }

[numerics]
n = 32
length = 6.283185307179586
dt = { fixed = 0.005 }
t_end = 3.0
cadence = 100
model = "linear"
"#;
    write(dir.path(), "mode.toml", cfg);
    let o = holoww(&["simulate", "--config", "mode.toml", "--out", "run", "--strict"], dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS dispersion relative phase error"), "{}", stdout(&o));
    let d: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run/dispersion.json")).unwrap()).unwrap();
    let exact = (2.0f64 * 2.0f64.tanh()).sqrt();
    assert!((d["report"]["omega_exact"].as_f64().unwrap() - exact).abs() < 1e-14);
    assert!((d["report"]["omega_measured"].as_f64().unwrap() - exact).abs() < 1e-6 * exact);
}

#[test]
fn config_errors_exit_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", &REST.replace("n = 32\n", ""));
    let o = holoww(&["simulate", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("numerics") && stderr(&o).contains("`n`"), "{}", stderr(&o));
    let o = holoww(&["simulate", "--config", "bad.toml", "--set", "numerics.n=31"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("numerics.n"), "{}", stderr(&o));
    let o = holoww(&["simulate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = holoww(&["verify", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nonsense"));
}

#[test]
fn steep_data_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rest.toml", REST);
    let o = holoww(
        &["simulate", "--config", "rest.toml", "--out", "run", "--set", "physics.initial={ kind = \"mode\", k = 4, amplitude = 0.5 }"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn strict_turns_failed_verdicts_into_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rest.toml", REST);
    // a coarse step on a moving wave leaves visible energy drift
    let set = ["--set", "physics.initial={ kind = \"mode\", k = 3, amplitude = 0.05 }", "--set", "numerics.dt={ fixed = 0.25 }"];
    let mut args = vec!["simulate", "--config", "rest.toml", "--out", "run"];
    args.extend(set);
    let o = holoww(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL energy relative drift"), "{}", stdout(&o));
    args.push("--strict");
    assert_eq!(holoww(&args, dir.path()).status.code(), Some(4));
}

#[test]
fn identical_config_and_seed_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rest.toml", REST);
    let wave = "physics.initial={ kind = \"packet\", amplitude = 0.01, center = 3.0, width = 0.8, carrier = 2.0 }";
    for out in ["a", "b"] {
        let o = holoww(&["simulate", "--config", "rest.toml", "--set", wave, "--seed", "5", "--out", out], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 5);
    for n in names {
        assert_eq!(fs::read(dir.path().join("a").join(&n)).unwrap(), fs::read(dir.path().join("b").join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn kernel_table_scales_with_depth() {
    let dir = tempfile::tempdir().unwrap();
    // K_h(x) = K(x/h)/h²: the h = 2 table on [1, 6]² is the h = 1 table on [0.5, 3]² rescaled.
    let base = ["kernel", "--set", "kernel.n=6"];
    let mut a = base.to_vec();
    a.extend(["--set", "kernel.x_max=3.0", "--set", "kernel.delta_ax=0.5", "--out", "h1", "--x0-grid", "0.5:1.5:3"]);
    let o = holoww(&a, dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS kernel mass"));
    let mut b = base.to_vec();
    b.extend(["--set", "kernel.x_max=6.0", "--set", "kernel.delta_ax=1.0", "--out", "h2", "--h", "2"]);
    assert!(holoww(&b, dir.path()).status.success());
    let t1 = data_rows(&dir.path().join("h1/kernel_table.csv"));
    let t2 = data_rows(&dir.path().join("h2/kernel_table.csv"));
    assert_eq!(t1.len(), 36);
    for (r1, r2) in t1.iter().zip(&t2) {
        assert!((r2[0] - 2.0 * r1[0]).abs() < 1e-12 && (r2[1] - 2.0 * r1[1]).abs() < 1e-12);
        assert!((r2[2] - r1[2] / 4.0).abs() <= 1e-15 * r1[2].abs());
    }
    let sweep = data_rows(&dir.path().join("h1/diagonal_integral.csv"));
    assert_eq!(sweep.len(), 3);
    assert!(sweep.iter().all(|r| r[1] < 0.0));
}

#[test]
fn verify_operators_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = holoww(&["verify", "operators", "--out", "v"], dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS Tilbert skew-symmetry"));
    assert!(dir.path().join("v/verify_operators.json").exists());
}

#[test]
fn norms_of_a_mode() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rest.toml", REST);
    let o = holoww(
        &["norms", "--config", "rest.toml", "--out", "n", "--set", "physics.initial={ kind = \"mode\", k = 1, amplitude = 0.01 }"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("n/norms.json")).unwrap()).unwrap();
    let e14 = v["report"]["e14"].as_f64().unwrap();
    assert!(e14 > 0.0 && e14.is_finite());
    assert!(data_rows(&dir.path().join("n/envelope.csv")).len() >= 2);
}
