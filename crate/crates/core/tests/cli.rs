use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catdistort")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("catdistort-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sigma_json() {
    let o = bin(&["sigma", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["length"], 9);
    assert_eq!(v["word"], "a1 a1 a2 a1 a3 a2 a2 a3 a3");
    assert!(String::from_utf8_lossy(&o.stderr).contains("pairs unique: true"));
}

#[test]
fn build_round_trips_through_spec_file() {
    let o = bin(&["build", "--block", "n=1", "m=2", "L=2"]);
    assert_eq!(o.status.code(), Some(0));
    let path = scratch("block.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let again = bin(&["build", "--spec", path.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn verify_block_passes() {
    let o = bin(&["verify", "--block", "n=1", "m=14", "L=14"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    let summary = String::from_utf8_lossy(&o.stderr);
    assert!(summary.contains("injective: yes ×1 family"), "{summary}");
    assert!(summary.contains("link girth: ≥ 2π"), "{summary}");
}

#[test]
fn verify_reports_bad_link_with_exit_one() {
    // relator length 2 gives a link with short cycles
    let o = bin(&["verify", "--chain", "l=2", "L=2"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], false);
}

#[test]
fn parameter_errors_exit_two() {
    for args in [
        &["build", "--block", "n=1", "m=5", "L=14"][..],
        &["build", "--double", "n=3", "m=14", "L=14"],
        &["build", "--block", "n=1", "q=3", "L=2"],
        &["build"],
        &["nonsense"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = bin(&["build", "--double", "n=3", "m=14", "L=14"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("14m ≤ n²"));
}

#[test]
fn ball_cap_exits_three() {
    let o = bin(&["ball", "--free", "rank=2", "--radius", "3", "--cap", "20"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["complete"], false);
}

#[test]
fn reduce_reports_trace() {
    let o = bin(&["reduce", "--block", "n=1", "m=2", "L=2", "--word", "t1 a1 t1^-1 a1^-1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["in_base"], true);
    assert_eq!(v["trace"].as_array().unwrap().len(), 1);
}

#[test]
fn witness_materializes_when_small() {
    let o = bin(&["witness", "--block", "n=1", "m=14", "L=14", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["f_length"]["exact"], "2744");
    assert_eq!(v["materialized"]["matches"], true);
}

#[test]
fn distortion_csv_and_audit() {
    let o = bin(&["distortion", "--block", "n=1", "m=2", "L=2", "--radius", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "radius,max_f_length,ball_size\n0,0,1\n1,1,7\n2,2,37\n3,3,167\n");
    let o = bin(&["distortion", "--block", "n=1", "m=2", "L=2", "--lower", "3"]);
    assert!(stdout(&o).starts_with("n_or_radius,value_exact_or_tower,representation\n"));
    let a = bin(&["--seed", "5", "distortion", "--block", "n=1", "m=2", "L=2", "--audit", "6", "--samples", "20"]);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 5);
}

#[test]
fn output_file_moves_summary_to_stdout_and_is_deterministic() {
    let p1 = scratch("a.json");
    let p2 = scratch("b.json");
    let args = |p: &PathBuf| {
        vec!["--output".to_string(), p.display().to_string(), "ball".into(), "--chain".into(), "l=2".into(), "L=2".into(), "--radius".into(), "2".into()]
    };
    let o1 = Command::new(env!("CARGO_BIN_EXE_catdistort")).args(args(&p1)).output().unwrap();
    let o2 = Command::new(env!("CARGO_BIN_EXE_catdistort")).args(args(&p2)).output().unwrap();
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o2.status.code(), Some(0));
    assert!(stdout(&o1).contains("ball sizes by radius"));
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = scratch("run.toml");
    std::fs::write(&cfg, "cap = 10\nseed = 3\n").unwrap();
    let o = bin(&["--config", cfg.to_str().unwrap(), "ball", "--free", "rank=2", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    let o = bin(&["--config", cfg.to_str().unwrap(), "sigma", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_dot() {
    let o = bin(&["export-dot", "--block", "n=1", "m=2", "L=2", "--boundary-only"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("graph"));
    let o = bin(&["export-dot", "--block", "n=1", "m=2", "L=2", "--stallings", "t1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("digraph"));
}
