use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_horizon-flow"));
    c.env_remove("OUT_DIR");
    c
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn list_shows_the_catalog() {
    let o = bin().arg("list").output().unwrap();
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().count() >= 14);
    assert!(out.contains("burgers/steady_pos_glimm"));
    assert!(out.contains("euler/steady_sub_super"));
}

#[test]
fn run_writes_sorted_burgers_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["run", "burgers/steady_pos_glimm", "--tmax", "0.1", "--cells", "20", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fields = dir.path().join("burgers__steady_pos_glimm.csv");
    let text = std::fs::read_to_string(&fields).unwrap();
    assert_eq!(text.lines().next(), Some("t,r,v"));
    let data = rows(&fields);
    assert!(data.len() >= 40);
    assert!(data.windows(2).all(|w| (w[0][0], w[0][1]) < (w[1][0], w[1][1])));
    let diag = std::fs::read_to_string(dir.path().join("burgers__steady_pos_glimm_diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().next(), Some("t,dt,tv_z,l1_vs_reference"));
}

#[test]
fn run_writes_euler_csv_with_density() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["run", "euler/steady_sub_super", "--tmax", "0.05", "--cells", "50", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("euler__steady_sub_super.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("t,r,rho,v"));
    let diag = std::fs::read_to_string(dir.path().join("euler__steady_sub_super_diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().next(), Some("t,dt,E_n,l1_vs_reference"));
}

#[test]
fn out_dir_variable_sets_the_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["run", "burgers/steady_neg_glimm", "--tmax", "0.05", "--cells", "16"]).env("OUT_DIR", dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("burgers__steady_neg_glimm.csv").is_file());
}

#[test]
fn run_accepts_a_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("custom.toml");
    let text = horizon_flow::scenarios::find("burgers/steady_neg_glimm").unwrap().to_toml().unwrap();
    std::fs::write(&cfg, text).unwrap();
    let o = bin().arg("run").arg(&cfg).args(["--tmax", "0.05", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_keys_in_a_scenario_file_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let mut text = horizon_flow::scenarios::find("burgers/steady_neg_glimm").unwrap().to_toml().unwrap();
    text.insert_str(0, "colour = \"red\"\n");
    std::fs::write(&cfg, text).unwrap();
    let o = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn unknown_scenario_fails() {
    let o = bin().args(["run", "no/such_scenario"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown scenario"));
}

#[test]
fn unknown_scheme_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["run", "burgers/steady_neg_glimm", "--scheme", "upwind", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn listed_scheme_names_are_accepted() {
    let out = stdout(&bin().arg("list").output().unwrap());
    for line in out.lines() {
        let scheme = line.split_whitespace().nth(2).unwrap();
        assert!(horizon_flow::scenarios::config::SchemeKind::parse(scheme).is_ok(), "{scheme}");
    }
}
