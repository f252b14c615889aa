use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gmfg(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmfg"))
        .args(args)
        .env("GMFG_OUTPUT_ROOT", root)
        .output()
        .unwrap()
}

const LEARN: &str = r#"
mode = "learn-infinite"
seed = 3
disc = 4
output_dir = "learn"

[env]
env = "sis"
horizon_override = { mode = "infinite", discount = 0.9 }

[graphon]
kind = "er"
p = 0.5

[learner]
epochs = 4
inner_steps = 500
"#;

const EXACT: &str = r#"
mode = "exact-fpi"
disc = 4
output_dir = "exact"

[env]
env = "sis"
horizon_override = { mode = "infinite", discount = 0.9 }

[graphon]
kind = "er"
p = 0.5
"#;

#[test]
fn run_writes_bundle_under_output_root() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("learn.toml");
    fs::write(&cfg, LEARN).unwrap();
    let out = gmfg(root.path(), &["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = root.path().join("learn");
    for f in ["metrics.csv", "equilibrium.json", "config.toml", "provenance.json"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    let first = fs::read(dir.join("metrics.csv")).unwrap();
    assert_eq!(fs::read_to_string(dir.join("metrics.csv")).unwrap().lines().count(), 5);

    let again = gmfg(root.path(), &["run", cfg.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(first, fs::read(dir.join("metrics.csv")).unwrap());

    let other = gmfg(root.path(), &["run", cfg.to_str().unwrap(), "--seed", "4"]);
    assert!(other.status.success());
    assert!(fs::read_to_string(dir.join("config.toml")).unwrap().contains("seed = 4"));
    let provenance = fs::read_to_string(dir.join("provenance.json")).unwrap();
    assert!(provenance.contains("\"seed\": 4") || provenance.contains("\"seed\":4"));
}

#[test]
fn compare_reports_distances() {
    let root = tempfile::tempdir().unwrap();
    let a = root.path().join("exact.toml");
    fs::write(&a, EXACT).unwrap();
    assert!(gmfg(root.path(), &["run", a.to_str().unwrap()]).status.success());
    let dir = root.path().join("exact");
    let out = gmfg(root.path(), &["compare", dir.to_str().unwrap(), dir.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["tv"].as_f64(), Some(0.0));
    assert_eq!(report["policy"].as_f64(), Some(0.0));
}

#[test]
fn bad_configs_exit_nonzero() {
    let root = tempfile::tempdir().unwrap();
    let missing_seed = root.path().join("a.toml");
    fs::write(&missing_seed, LEARN.replace("seed = 3\n", "")).unwrap();
    let unknown = root.path().join("b.toml");
    fs::write(&unknown, EXACT.replace("disc = 4", "disc = 4\nbogus = 1")).unwrap();
    for cfg in [&missing_seed, &unknown] {
        let out = gmfg(root.path(), &["run", cfg.to_str().unwrap()]);
        assert!(!out.status.success());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let out = gmfg(root.path(), &["run", root.path().join("none.toml").to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn misspelled_nested_keys_are_rejected() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("c.toml");
    fs::write(&cfg, EXACT.replace("horizon_override", "horizon")).unwrap();
    assert!(!gmfg(root.path(), &["run", cfg.to_str().unwrap()]).status.success());
    fs::write(&cfg, LEARN.replace("inner_steps", "inner_step")).unwrap();
    assert!(!gmfg(root.path(), &["run", cfg.to_str().unwrap()]).status.success());
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = gmfg::config::RunConfig::from_path(&path).unwrap();
        config.validate().unwrap();
        seen += 1;
    }
    assert_eq!(seen, 5);
}
