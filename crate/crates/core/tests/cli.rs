use std::path::Path;
use std::process::Command;

const CONFIG: &str = "\
# small smoke-test experiment
model = compound_poisson
jump = exponential
functional = gaussian
kernel = sinc
n_list = 500,1000,2000,4000
m_grid = 1..4
replications = 8
seed = 1
mu_smoothness = 1
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowfreq-levy"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, usize) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().collect::<Result<Vec<_>, _>>().unwrap().len();
    (header, rows)
}

#[test]
fn run_writes_tables_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("out");
    let status = bin().args(["--threads", "2", "--seed", "5", "--out-dir"]).arg(&out).arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["config"]["seed"], 5);
    assert_eq!(summary["sizes"].as_array().unwrap().len(), 4);
    let (header, rows) = csv_rows(&out.join("risk_surface.csv"));
    assert_eq!(header[..4], ["n", "t", "m", "variant"]);
    // 4 sizes × 4 bandwidths × 2 inverses
    assert_eq!(rows, 32);
    for name in ["adaptive.csv", "m_hat_histogram.csv", "slopes.csv", "plot_oracle_bandwidth_mse.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn rates_and_oracle_check() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = tmp.path().join("o");
    assert!(bin().arg("--out-dir").arg(&out).arg("rates").arg(&cfg).status().unwrap().success());
    let rates = json(&out.join("rates.json"));
    assert_eq!(rates["schema_version"], 1);
    assert_eq!(csv_rows(&out.join("rates.csv")).1, 4);

    assert!(bin().arg("oracle-check").arg(&cfg).arg("--out-dir").arg(&out).status().unwrap().success());
    let check = json(&out.join("oracle_check.json"));
    assert_eq!(check["schema_version"], 1);
    assert_eq!(check["m_grid"], serde_json::json!([1, 2, 3, 4]));
}

#[test]
fn bad_config_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "model = compound_poisson\nbogus_key = 3\n");
    let output = bin().arg("--out-dir").arg(tmp.path()).arg("run").arg(&cfg).output().unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("bogus_key"), "{err}");
}
