use std::fs;
use std::path::{Path, PathBuf};

use skewbc::config::{parse_config, RunConfig};
use skewbc::scenario::{run_file, run_scenario, EXIT_BOUND, EXIT_CONFIG, EXIT_IO, EXIT_PASS};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn load(name: &str, dir: &Path) -> RunConfig {
    let mut c = parse_config(&fs::read_to_string(config_path(name)).unwrap()).unwrap();
    c.output.dir = dir.to_path_buf();
    c
}

#[test]
fn shipped_configs_parse() {
    for entry in fs::read_dir(config_path("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = fs::read_to_string(&path).unwrap();
            assert!(parse_config(&text).is_ok(), "{}", path.display());
        }
    }
}

#[test]
fn homogeneous_cee_inflow_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&load("cee-homogeneous-inflow.toml", dir.path()));
    assert_eq!(out.exit_code, EXIT_PASS, "{:?}", out.error);
    let s = out.summary.unwrap();
    assert!(s.homogeneous);
    assert_eq!(s.verdict, "pass");
    assert!(s.final_energy <= s.initial_energy);
    assert!(out.csv_path.unwrap().exists());
    assert!(out.json_path.unwrap().exists());
}

#[test]
fn violating_preset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&load("cee-dirichlet-violation.toml", dir.path()));
    assert_eq!(out.exit_code, EXIT_BOUND);
    let s = out.summary.unwrap();
    assert_eq!(s.verdict, "bound-violation");
    assert!(s.bound.min_face_margin.unwrap() < -0.1);
}

#[test]
fn zero_end_time_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = load("iee-oblique.toml", dir.path());
    c.time.t_end = 0.0;
    let out = run_scenario(&c);
    assert_eq!(out.exit_code, EXIT_PASS);
    let csv = fs::read_to_string(out.csv_path.unwrap()).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("t,energy,"));
}

#[test]
fn csv_rows_carry_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = load("swe-source.toml", dir.path());
    c.time.t_end = 0.05;
    let out = run_scenario(&c);
    assert_eq!(out.exit_code, EXIT_PASS);
    let csv = fs::read_to_string(out.csv_path.unwrap()).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mut rows = 0;
    let mut last_t = f64::NEG_INFINITY;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), header.len());
        let t: f64 = cells[0].parse().unwrap();
        assert!(t > last_t);
        last_t = t;
        let mantissa = cells[1].split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{}", cells[1]);
        rows += 1;
    }
    assert!(rows >= 2);
}

#[test]
fn json_records_seed_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = load("iee-oblique.toml", dir.path());
    c.time.t_end = 0.02;
    c.seed = 99;
    let out = run_scenario(&c);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.json_path.unwrap()).unwrap()).unwrap();
    assert_eq!(json["seed"], 99);
    assert_eq!(json["verdict"], "pass");
    assert_eq!(json["exit_code"], 0);
}

#[test]
fn identical_seed_gives_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |dir: &Path| {
        let mut c = load("iee-oblique.toml", dir);
        c.time.t_end = 0.05;
        c.time.cadence = 1;
        fs::read(run_scenario(&c).csv_path.unwrap()).unwrap()
    };
    assert_eq!(run(a.path()), run(b.path()));

    let other = tempfile::tempdir().unwrap();
    let mut c = load("iee-oblique.toml", other.path());
    c.time.t_end = 0.05;
    c.time.cadence = 1;
    c.seed += 1;
    let changed = fs::read(run_scenario(&c).csv_path.unwrap()).unwrap();
    assert_ne!(run(a.path()), changed);
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let mut c = load("cee-homogeneous-inflow.toml", &blocker.join("sub"));
    c.time.t_end = 0.0;
    assert_eq!(run_scenario(&c).exit_code, EXIT_IO);
}

#[test]
fn missing_file_and_bad_config() {
    assert_eq!(run_file(Path::new("/nonexistent/run.toml"), |_| {}).exit_code, EXIT_IO);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = fs::read_to_string(config_path("iee-oblique.toml")).unwrap();
    fs::write(&path, text.replace("order = 4", "order = 3")).unwrap();
    let out = run_file(&path, |_| {});
    assert_eq!(out.exit_code, EXIT_CONFIG);
    assert!(out.error.unwrap().to_string().contains("unsupported order"));
}

#[test]
fn overrides_apply_before_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_file(&config_path("cee-homogeneous-inflow.toml"), |c| {
        c.output.dir = dir.path().to_path_buf();
        c.order = 4;
        c.time.cadence = 2;
    });
    assert_eq!(out.exit_code, EXIT_PASS, "{:?}", out.error);
    let s = out.summary.unwrap();
    assert_eq!(s.order, 4);
    assert!(s.samples <= s.steps / 2 + 2);
}
