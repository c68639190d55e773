use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn epg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epg"))
        .args(args)
        .output()
        .expect("spawn epg")
}

fn epg_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epg"))
        .args(args)
        .env("EPG_THREADS", threads)
        .output()
        .expect("spawn epg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn lg_quartic_json() {
    let o = epg(&[
        "lg",
        "--weights",
        "1,1,1,1",
        "--degree",
        "4",
        "--qmax",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["formula"], "lg");
    assert_eq!(v["cy_flag"], true);
    assert_eq!(v["dimension"], "2/1");
    assert!(!v["terms"].as_array().unwrap().is_empty());
}

#[test]
fn text_output_shapes() {
    let o = epg(&["lg", "--weights", "1,1,1,1", "--degree", "4", "--qmax", "0"]);
    let s = stdout(&o);
    assert!(
        s.contains("series: (2)·y^-1 + (20) + (2)·y^1 + O(q^>0)"),
        "{s}"
    );

    let o = epg(&["lg", "--weights", "1", "--degree", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("series: 0 + O(q^>2)"));

    let o = epg(&["lg", "--weights", "1,1", "--degree", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("cy_flag: false"));
}

#[test]
fn weighted_and_fermat_k3_agree() {
    // the weighted run works over a larger cyclotomic field, so compare the text series
    let series = |o: Output| {
        stdout(&o)
            .lines()
            .find(|l| l.starts_with("series:"))
            .unwrap()
            .to_string()
    };
    let a = series(epg(&[
        "cy",
        "--weights",
        "3,1,1,1",
        "--degree",
        "6",
        "--qmax",
        "1",
    ]));
    let b = series(epg(&["cy", "--fermat", "4", "--qmax", "1"]));
    assert_eq!(a, b);
}

#[test]
fn hybrid_phase() {
    let o = epg(&[
        "hybrid", "--n", "2", "--m", "3", "--phase", "h1", "--qmax", "0", "--format", "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["cy_flag"], true);
}

#[test]
fn verify_commands() {
    let o = epg(&["verify", "lgcy", "--n", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("PASS lg-cy n=4"));

    let o = epg(&[
        "verify",
        "weighted",
        "--weights",
        "1,2,3",
        "--degree",
        "6",
        "--qmax",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = epg(&[
        "verify", "hybrid", "--n", "2", "--m", "2", "--qmax", "1", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)[0]["status"], "pass");
}

#[test]
fn jacobi_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let k3 = epg(&["cy", "--fermat", "4", "--qmax", "2", "--format", "json"]);
    let path = write(dir.path(), "k3.json", &stdout(&k3));
    let o = epg(&["verify", "jacobi", "--input", &path]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    // not CY, so no index is claimed
    let cubic = epg(&[
        "lg",
        "--weights",
        "1,1",
        "--degree",
        "3",
        "--format",
        "json",
    ]);
    let path = write(dir.path(), "cubic.json", &stdout(&cubic));
    assert_eq!(code(&epg(&["verify", "jacobi", "--input", &path])), 4);

    let path = write(dir.path(), "junk.json", "{\"terms\": 3}");
    assert_eq!(code(&epg(&["verify", "jacobi", "--input", &path])), 2);
}

#[test]
fn campaign_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"[
            {"check": "lgcy", "params": {"n": 3, "qmax": 1}},
            {"check": "untwisted-q0", "params": {"weights": [1, 1, 1], "degree": 3}},
            {"check": "negative-control", "params": {"qmax": 1, "expect": "fail"}}
        ]"#,
    );
    let o = epg(&["verify", "campaign", "--file", &good, "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(json(&o).as_array().unwrap().len(), 3);

    let bad = write(
        dir.path(),
        "bad.json",
        r#"[{"check": "negative-control", "params": {"qmax": 1}}]"#,
    );
    let o = epg(&["verify", "campaign", "--file", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("FAIL"));

    let unknown = write(dir.path(), "unknown.json", r#"[{"check": "nope"}]"#);
    assert_eq!(code(&epg(&["verify", "campaign", "--file", &unknown])), 1);

    let broken = write(dir.path(), "broken.json", "[{");
    assert_eq!(code(&epg(&["verify", "campaign", "--file", &broken])), 2);
}

#[test]
fn input_errors() {
    assert_eq!(code(&epg(&["lg", "--weights", "x", "--degree", "2"])), 2);
    assert_eq!(
        code(&epg(&[
            "lg",
            "--weights",
            "1",
            "--degree",
            "2",
            "--qmax",
            "-1"
        ])),
        2
    );
    assert_eq!(
        code(&epg(&[
            "lg",
            "--weights",
            "1,1",
            "--degree",
            "4",
            "--group",
            "[1/2"
        ])),
        2
    );
    assert_eq!(
        code(&epg(&["verify", "lgcy", "--n", "3", "--qmax", "1/2"])),
        2
    );
    assert_eq!(code(&epg(&["cy"])), 2);
}

#[test]
fn singular_sector() {
    let o = epg(&["origin", "--weights", "1", "--degree", "1", "--c", "0"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn output_independent_of_threads() {
    let args = [
        "verify", "hybrid", "--n", "2", "--m", "3", "--qmax", "1", "--format", "json",
    ];
    let one = epg_env(&args, "1");
    let four = epg_env(&args, "4");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);

    let args = [
        "lg",
        "--weights",
        "1,1,1,1,1",
        "--degree",
        "5",
        "--qmax",
        "1",
        "--format",
        "json",
    ];
    assert_eq!(epg_env(&args, "1").stdout, epg_env(&args, "3").stdout);
}

#[test]
fn sample_campaign_passes() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/../../campaigns/smoke.json");
    let o = epg(&["verify", "campaign", "--file", file]);
    let s = stdout(&o);
    assert_eq!(code(&o), 0, "{s}");
    assert_eq!(
        s.lines().filter(|l| l.starts_with("PASS")).count(),
        11,
        "{s}"
    );
}
