use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use periodlab::report::Report;
use periodlab::{from_json, run, ExperimentConfig};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_periodlab"))
}

fn maps_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../maps")
}

fn periodlab(args: &[&str]) -> Output {
    bin().args(args).env_remove("PERIODLAB_THREADS").output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_of(out: &Output) -> (i32, Value) {
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is one JSON object");
    (out.status.code().unwrap(), err)
}

fn cube() -> String {
    maps_dir().join("cube.json").to_string_lossy().into_owned()
}

#[test]
fn power_map_csv() {
    let out = periodlab(&["power-map", "--q", "2", "--p", "3", "--k-max", "3", "--format", "csv"]);
    assert_eq!(stdout(&out), "k,order,p_valuation\n1,2,0\n2,6,1\n3,18,2\n");
}

#[test]
fn verify_cube() {
    let out = periodlab(&["verify", "--map", &cube(), "--p", "5", "--f", "1", "--e", "1,2", "--n-max", "4", "--precision", "6"]);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["invariance_ok"], Value::Bool(true));
    assert_eq!(report["bounds"]["coprime"], Value::String("24".into()));
    assert_eq!(report["census"]["n_pts"], 6);
    assert_eq!(report["max_coprime_period"], 2);
}

#[test]
fn census_markdown() {
    let out = periodlab(&["census", "--map", &cube(), "--p", "5", "--format", "markdown"]);
    let text = stdout(&out);
    assert!(text.contains("| q | N_pts | d | cycles | Per |"));
    assert!(text.contains("| 5 | 6 | 1 | 1 1 1 1 2 | 1 2 |"));
}

#[test]
fn torsion_commands() {
    let sieve: Value = serde_json::from_str(&stdout(&periodlab(&["sieve", "--q", "2", "--p", "5", "--a", "1", "--m-max", "6"]))).unwrap();
    let ells: Vec<&str> = sieve["primes"].as_array().unwrap().iter().map(|x| x["ell"].as_str().unwrap()).collect();
    assert_eq!(ells, ["3", "5", "7"]);
    let csv = stdout(&periodlab(&["sieve", "--q", "2", "--p", "5", "--a", "1", "--m-max", "6", "--format", "csv"]));
    assert!(csv.starts_with("ell,m,b,exponent,is_p,probable\n3,2,0,2,false,false\n"));

    let ec: Value = serde_json::from_str(&stdout(&periodlab(&["ec-torsion", "--a4", "1", "--a6", "0", "--p", "5"]))).unwrap();
    assert_eq!(ec["primes"], serde_json::json!([2]));
    assert_eq!(ec["undetermined"], 5);

    let tower: Value = serde_json::from_str(&stdout(&periodlab(&["tower", "--vdelta", "6", "--p", "3", "--e", "2,6,18,54"]))).unwrap();
    assert_eq!(tower["prime_to_p"], serde_json::json!([4, 4, 4, 4]));
    assert_eq!(tower["stable"], Value::Bool(true));

    let density: Value = serde_json::from_str(&stdout(&periodlab(&["density", "--p", "5", "--X", "100000"]))).unwrap();
    assert!((density["ratio"].as_f64().unwrap() - 0.25).abs() < 0.01);
}

#[test]
fn lift_and_find_periodic() {
    let square = maps_dir().join("square.json");
    let square = square.to_str().unwrap();
    let lift: Value = serde_json::from_str(&stdout(&periodlab(&[
        "lift", "--map", square, "--p", "7", "--precision", "2", "--cycle", "[[2],[4]]",
    ])))
    .unwrap();
    assert_eq!(lift["lifted"][0]["integers"], serde_json::json!([30]));
    assert_eq!(lift["lifted"][1]["integers"], serde_json::json!([18]));

    let zeta = maps_dir().join("zeta_rotation.json");
    let found: Value = serde_json::from_str(&stdout(&periodlab(&[
        "find-periodic", "--map", zeta.to_str().unwrap(), "--p", "3", "--e", "2", "--eisenstein", "zeta_p",
        "--precision", "4", "--n-max", "3",
    ])))
    .unwrap();
    let certs = found["certificates"].as_array().unwrap();
    // Only the multiples of π² are fixed; every other class has period 3.
    assert_eq!(certs.len(), 81);
    assert_eq!(certs.iter().filter(|c| c["n"] == 1).count(), 3);
    assert!(certs.iter().filter(|c| c["n"] == 3).all(|c| c["t"] == 1 && c["m"] == 1));
}

#[test]
fn error_paths_exit_with_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"space":"affine","dim":1"#).unwrap();
    let (status, err) = error_of(&periodlab(&["census", "--map", bad.to_str().unwrap(), "--p", "5"]));
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "cli.SchemaError"));

    let (status, err) = error_of(&periodlab(&["census", "--map", &cube(), "--p", "6"]));
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "residue_field.NotPrime"));

    let (status, err) = error_of(&periodlab(&["power-map", "--q", "2", "--p", "3", "--k-max", "3", "--format", "xml"]));
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "cli.UnsupportedFormat"));

    let (status, err) = error_of(&periodlab(&["tower", "--vdelta", "1", "--p", "3", "--e", "2,3"]));
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "torsion_sieve.BadTower"));

    let missing = dir.path().join("missing.json");
    let (status, err) = error_of(&periodlab(&["census", "--map", missing.to_str().unwrap(), "--p", "5"]));
    assert_eq!((status, err["code"].as_str().unwrap()), (1, "cli.Io"));

    let out = bin()
        .args(["verify", "--map", &cube(), "--p", "5", "--e", "1", "--n-max", "2"])
        .env("PERIODLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(error_of(&out).1["code"], "cli.SchemaError");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/verify_cube.json");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let path = dir.path().join(format!("out{i}.md"));
        let status = bin()
            .args(["run", "--config", config.to_str().unwrap(), "--output", path.to_str().unwrap()])
            .env("PERIODLAB_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(String::from_utf8_lossy(&outputs[0]).contains("| invariance_ok | true |"));
}

#[test]
fn subcommand_matches_config_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sieve.json");
    std::fs::write(&config, r#"{"command":"sieve","params":{"q":3,"p":5,"a":2,"m_max":4}}"#).unwrap();
    let via_config = stdout(&periodlab(&["run", "--config", config.to_str().unwrap()]));
    let direct = stdout(&periodlab(&["sieve", "--q", "3", "--p", "5", "--a", "2", "--m-max", "4"]));
    assert_eq!(via_config, direct);
}

#[test]
fn every_report_round_trips_through_json() {
    let configs = [
        r#"{"command":"census","map":{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[2],"coeff":"1"}]}]},"field":{"p":7}}"#,
        r#"{"command":"bounds","map":{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[2],"coeff":"1"}]}]},"field":{"p":3,"f":2},"params":{"e":2}}"#,
        r#"{"command":"lift","map":{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[2],"coeff":"1"}]}]},"ring":{"p":7,"e":2,"precision":5},"params":{"cycle":[[2],[4]]}}"#,
        r#"{"command":"find-periodic","map":{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[3],"coeff":"1"}]}]},"ring":{"p":5,"precision":3},"params":{"n_max":2}}"#,
        r#"{"command":"verify","map":{"space":"affine","dim":1,"polys":[{"monomials":[{"exps":[2],"coeff":"1"},{"exps":[0],"coeff":"-1"}]}]},"field":{"p":3},"params":{"e_list":[1,2],"n_max":2}}"#,
        r#"{"command":"power-map","params":{"q":10,"p":3,"k_max":30}}"#,
        r#"{"command":"sieve","params":{"q":7,"p":3,"a":2,"m_max":5}}"#,
        r#"{"command":"density","params":{"p":7,"X":50000}}"#,
        r#"{"command":"ec-torsion","field":{"p":13,"f":2},"params":{"a4":2,"a6":-3}}"#,
        r#"{"command":"tower","params":{"v_delta":5,"p":2,"e_seq":[1,3,6,12]}}"#,
    ];
    for text in configs {
        let report = run(&ExperimentConfig::from_json(text).unwrap()).unwrap();
        let json = periodlab::render::to_json(&report).unwrap();
        let back: Report = from_json(&json).unwrap();
        assert_eq!(back, report, "{text}");
        assert_eq!(periodlab::render::to_json(&back).unwrap(), json);
        // Every report also renders as CSV and Markdown.
        assert!(periodlab::render::to_csv(&report).unwrap().contains('\n'));
        assert!(periodlab::render::to_markdown(&report).starts_with("# "));
    }
}
