use std::path::{Path, PathBuf};
use std::process::Command;

const SMALL: &str = r#"
seed = 5

[system]
n_r = 12
k = 3
m_i = [2, 3, 2]

[ber]
decouplers = ["sd", "svd", "pinv"]
snr_db = [0, 10]
bits_per_point = 2800
vectors_per_channel = 3

[audit]
trials = 6

[flops]
k_sweep = [3, 4]
m_i_sweep = [1, 2]
k_fixed = 3

[include]
new_users = 2
"#;

fn seqdec(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_seqdec"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run_in(dir: &Path, cmd: &str, cfg: &Path, extra: &[&str]) -> String {
    let out = dir.join(format!(
        "{cmd}-{}",
        extra.join("_").replace(['=', '/', '.'], "-")
    ));
    let mut args = vec![
        cmd,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let (code, err) = seqdec(&args);
    assert_eq!(code, 0, "{cmd}: {err}");
    std::fs::read_to_string(out.join(format!("{cmd}.csv"))).unwrap()
}

fn golden_header(cmd: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{cmd}.csv"));
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn csv_headers_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for cmd in ["ber", "audit", "flops", "include"] {
        let body = run_in(dir.path(), cmd, &cfg, &[]);
        let header = body.lines().next().unwrap();
        assert_eq!(format!("{header}\n"), golden_header(cmd), "{cmd}");
        assert!(body.lines().count() > 1, "{cmd} produced no rows");
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for cmd in ["ber", "audit", "flops", "include"] {
        let one = run_in(dir.path(), cmd, &cfg, &["--threads", "1"]);
        let four = run_in(dir.path(), cmd, &cfg, &["--threads", "4"]);
        assert_eq!(one, four, "{cmd}");
    }
}

#[test]
fn seed_flag_changes_ber_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = run_in(dir.path(), "ber", &cfg, &[]);
    let b = run_in(dir.path(), "ber", &cfg, &["--seed", "6"]);
    assert_ne!(a, b);
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let first = run_in(dir.path(), "ber", &cfg, &["--override", "ber.snr_db=[2,6]"]);
    let manifest = dir
        .path()
        .join("ber---override_ber-snr_db-[2,6]/ber_manifest.json");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(json["seed"], 5);
    assert!(json["snr_definition"].as_str().unwrap().contains("SNR"));
    assert_eq!(json["config"]["ber"]["snr_db"][1], 6.0);
    assert!(json["cost_model"]["qr"].is_number());
    let again = run_in(dir.path(), "ber", &manifest, &[]);
    assert_eq!(first, again);
}

#[test]
fn csv_round_trips_through_a_reader() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let body = run_in(dir.path(), "ber", &cfg, &[]);
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    // 3 decouplers x 2 detectors x 2 SNR points x (3 users + aggregate).
    assert_eq!(rows.len(), 48);
    let mut per_user = 0u64;
    for r in &rows {
        let errs: u64 = r[4].parse().unwrap();
        let sent: u64 = r[5].parse().unwrap();
        let ber: f64 = r[6].parse().unwrap();
        assert_eq!(ber, errs as f64 / sent as f64);
        if &r[3] == "all" {
            assert_eq!(errs, per_user);
            assert_eq!(sent, 2800);
            per_user = 0;
        } else {
            per_user += errs;
        }
    }
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let body = run_in(
        dir.path(),
        "flops",
        &cfg,
        &[
            "--override",
            "flops.k_sweep=[]",
            "--override",
            "flops.m_i_sweep=[]",
        ],
    );
    assert_eq!(body, golden_header("flops"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("x");
    let base = [
        "ber",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    let with = |o: &str| {
        let mut v = base.to_vec();
        v.extend(["--override", o]);
        seqdec(&v).0
    };
    assert_eq!(with("ber.snr_db=[3,1]"), 2);
    assert_eq!(with("ber.constellation=8psk"), 2);
    assert_eq!(with("system.m_i=7"), 2);
    assert_eq!(with("no_such_key=1"), 2);
    assert_eq!(with("system.n_r=4"), 3);
    assert_eq!(seqdec(&["audit", "--config", "/nonexistent.toml"]).0, 1);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = [").unwrap();
    assert_eq!(seqdec(&["ber", "--config", bad.to_str().unwrap()]).0, 2);
    assert_eq!(seqdec(&base).0, 0);
}

#[test]
fn noiseless_ber_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let body = run_in(
        dir.path(),
        "ber",
        &cfg,
        &[
            "--override",
            "ber.snr_db=[60]",
            "--override",
            "ber.bits_per_point=10500",
        ],
    );
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    for r in rdr.records() {
        assert_eq!(&r.unwrap()[4], "0");
    }
}
