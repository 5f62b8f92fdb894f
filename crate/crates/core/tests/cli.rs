use std::process::Command;

use adez::cli::run;
use serde_json::Value;

fn payload(stdout: &str) -> Value {
    let doc: Value = serde_json::from_str(stdout).expect("json output");
    doc["payload"].clone()
}

fn c(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn describe_e6_and_e8() {
    let o = run(["adez", "describe", "E6"]);
    assert_eq!(o.code, 0);
    let p = payload(&o.stdout);
    assert_eq!(p["l"], 3);
    assert_eq!(p["k"], "3");
    assert_eq!(p["invariant"]["dimension"], 1);
    assert_eq!(p["report_schema"], 1);
    assert_eq!(p["cosets"][1]["norm"], "4/3");

    let p = payload(&run(["adez", "describe", "E8"]).stdout);
    assert_eq!(p["l"], 1);
    assert_eq!(p["invariant"]["dimension"], 1);
}

#[test]
fn unknown_family_is_a_usage_error() {
    let o = run(["adez", "describe", "Q9"]);
    assert_eq!(o.code, 2);
    assert!(o.stdout.is_empty());
    assert!(o.stderr.contains("A, D, E"), "{}", o.stderr);
}

#[test]
fn theta_a1_at_one() {
    let o = run(["adez", "eval", "A1", "--what", "theta", "--point", "1,0"]);
    assert_eq!(o.code, 0);
    let p = payload(&o.stdout);
    let (t0, _) = c(&p["values"][0]);
    let (t1, _) = c(&p["values"][1]);
    assert!((t0 - 1.0037349).abs() < 1e-7);
    assert!((t1 - 0.4157606).abs() < 1e-7);
    let tau = payload(
        &run([
            "adez", "eval", "A1", "--what", "theta", "--point", "0,1", "--plane", "tau",
        ])
        .stdout,
    );
    assert_eq!(tau["values"], p["values"]);
}

#[test]
fn xi_pole_at_zero_names_residue() {
    let o = run(["adez", "eval", "A1", "--what", "xi", "--point", "0,0"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("pole"));
    assert!(o.stderr.contains("-e0"));
}

#[test]
fn zeta_e8_auto_runs_both_methods() {
    let o = run(["adez", "eval", "E8", "--what", "zeta", "--point", "6,0"]);
    assert_eq!(o.code, 0);
    let p = payload(&o.stdout);
    assert_eq!(p["result"]["method"], "continued");
    assert_eq!(p["direct"]["method"], "direct");
    assert_eq!(p["cross_check"]["consistent"], true);
}

#[test]
fn direct_method_rejects_strip() {
    let o = run([
        "adez", "eval", "A2", "--what", "zeta", "--point", "0.5,1", "--method", "direct",
    ]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("Re s >= k + 1/2"));
}

#[test]
fn verify_e8_passes_everything() {
    let o = run(["adez", "verify", "E8"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let p = payload(&o.stdout);
    assert_eq!(p["summary"]["fail"], 0);
    let fe = p["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "fe.projected")
        .unwrap();
    assert!(fe["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_d6_weil_flags_classification() {
    let o = run(["adez", "verify", "D6", "--suite", "weil"]);
    let p = payload(&o.stdout);
    let rec = p["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "weil.classification")
        .unwrap()
        .clone();
    assert_eq!(rec["status"], "expected-obstruction");
    assert_eq!(rec["flag"], "classification-mismatch");
}

#[test]
fn verify_a1_fe_records_obstruction_check() {
    let o = run(["adez", "verify", "A1", "--suite", "fe"]);
    let p = payload(&o.stdout);
    let rec = p["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "fe.raw_obstruction")
        .unwrap()
        .clone();
    let status = rec["status"].as_str().unwrap();
    assert!(status == "expected-obstruction" || status == "fail");
    assert_eq!(o.code, if p["summary"]["fail"] == 0 { 0 } else { 1 });
}

#[test]
fn payload_is_deterministic() {
    let a = run(["adez", "verify", "A2", "--suite", "all"]);
    let b = run(["adez", "verify", "A2", "--suite", "all"]);
    let pa = payload(&a.stdout);
    let pb = payload(&b.stdout);
    assert_eq!(
        serde_json::to_string(&pa).unwrap(),
        serde_json::to_string(&pb).unwrap()
    );
    let da: Value = serde_json::from_str(&a.stdout).unwrap();
    let db: Value = serde_json::from_str(&b.stdout).unwrap();
    assert_eq!(
        da["metadata"]["payload_sha256"],
        db["metadata"]["payload_sha256"]
    );
}

#[test]
fn scan_is_conjugation_symmetric() {
    let o = run([
        "adez", "scan", "E8", "--re", "2", "--t-min", "-10", "--t-max", "10", "--steps", "21",
    ]);
    assert_eq!(o.code, 0);
    let rows = payload(&o.stdout)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 21);
    for j in 0..21 {
        let (a, b) = c(&rows[j]["xi_hat"][0]);
        let (x, y) = c(&rows[20 - j]["xi_hat"][0]);
        assert!((a.hypot(b) - x.hypot(y)).abs() < 1e-10 * a.hypot(b).max(1.0));
    }
}

#[test]
fn scan_csv_has_component_columns() {
    let o = run([
        "adez", "--format", "csv", "scan", "D4", "--re", "1", "--t-min", "0", "--t-max", "5",
        "--steps", "11",
    ]);
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert!(lines[0].starts_with("# spec=D4,k=2"));
    assert_eq!(lines[1].split(',').count(), 1 + 4 * 3 + 1);
    assert_eq!(lines.len(), 2 + 11);
    let first: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(
        first[1]
            .split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .len(),
        18
    );
}

#[test]
fn scan_shifts_off_pole() {
    let o = run([
        "adez", "scan", "A2", "--re", "1", "--t-min", "0", "--t-max", "1", "--steps", "2",
    ]);
    assert_eq!(o.code, 0);
    let rows = payload(&o.stdout)["rows"].as_array().unwrap().clone();
    assert!(rows[0]["warning"].as_str().unwrap().contains("pole"));
    assert!(rows[1].get("warning").is_none());
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("adez-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("e8.json");
    let o = run(["adez", "describe", "E8", "--out", path.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(payload(&text)["spec"], "E8");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_adez");
    let ok = Command::new(bin)
        .args(["verify", "E8", "--suite", "lattice"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let usage = Command::new(bin)
        .args([
            "scan", "E8", "--re", "2", "--t-min", "0", "--t-max", "1", "--steps", "1",
        ])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let red = Command::new(bin)
        .args(["verify", "A2", "--suite", "weil"])
        .output()
        .unwrap();
    assert_eq!(red.status.code(), Some(1));
}
