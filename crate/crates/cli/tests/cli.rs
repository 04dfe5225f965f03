use std::path::Path;
use std::process::{Command, Output};

use ostrovsky_core::io::{parse_field, read_profile, write_profile};
use ostrovsky_core::lemmas::{default_corpus, LemmaId};
use ostrovsky_core::{propagate, PropagatorConfig, Sign, SpaceGrid};
use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ostrovsky-lab"))
        .args(args)
        .env_remove("OSTROVSKY_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn read(p: &str) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn trace_starts_at_zero() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "trace.csv");
    let o = lab(&["trace", "--profile", "builtin:gauss_unit", "--t", "0,1e-4,1e-3", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,deviation"));
    assert_eq!(lines.next(), Some("0.0,0.0"));
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains('\r'));
    let meta: serde_json::Value = serde_json::from_str(&read(&format!("{out}.meta.json"))).unwrap();
    assert_eq!(meta["config"]["subcommand"], "trace");
    assert_eq!(meta["row_count"], 3);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    for out in [&a, &b] {
        let o = lab(&[
            "stochastic-continuity", "--alpha", "0.5", "--t", "0,1e-1,1e-2", "--n", "300", "--x", "0",
            "--profile", "builtin:gauss_bump", "--seed", "5", "--out", out,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = read(&a);
    assert!(text.starts_with("t,prob,wilson_lo,wilson_hi\n0.0,0.0,"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (path(&dir, "a.csv"), path(&dir, "b.csv"), path(&dir, "c.csv"));
    let args = ["khinchine", "--p", "2,4", "--n", "5000", "--c", "1,0.5,-0.25", "--seed", "3"];
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ostrovsky-lab"));
        cmd.args(args).args(extra).env_remove("OSTROVSKY_LAB_THREADS");
        if let Some(n) = env {
            cmd.env("OSTROVSKY_LAB_THREADS", n);
        }
        assert!(cmd.status().unwrap().success());
    };
    run(&["--threads", "1", "--out", &a], None);
    run(&["--threads", "4", "--out", &b], None);
    run(&["--out", &c], Some("3"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn propagate_output_parses_back() {
    let dir = TempDir::new().unwrap();
    let prof = path(&dir, "p.csv");
    let p = default_corpus().remove(1).profile;
    write_profile(&p, Path::new(&prof)).unwrap();
    let out = path(&dir, "u.csv");
    let o = lab(&[
        "propagate", "--profile", &prof, "--t", "0.1", "--x-min", "-5", "--x-max", "5", "--nx", "101", "--sign", "-",
        "--out", &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let field = parse_field(std::fs::File::open(&out).unwrap()).unwrap();
    let p = read_profile(Path::new(&prof)).unwrap();
    let direct = propagate(&p, PropagatorConfig::new(0.1, Sign::Minus), &SpaceGrid::spanning(-5.0, 5.0, 101).unwrap()).unwrap();
    assert_eq!(field.values(), direct.values());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "run.cfg");
    std::fs::write(&cfg, "# trace settings\nprofile = builtin:gauss_narrow\nt = 0, 1e-3\nx = 0.5\n").unwrap();
    let out = path(&dir, "t.csv");
    let o = lab(&["trace", "--config", &cfg, "--x", "0", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value = serde_json::from_str(&read(&format!("{out}.meta.json"))).unwrap();
    assert_eq!(meta["config"]["x"], 0.0);
    assert_eq!(meta["config"]["t"], serde_json::json!([0.0, 1e-3]));

    std::fs::write(&cfg, "profile = builtin:gauss_narrow\nt = 0, 1e-3\nx = zero\n").unwrap();
    let o = lab(&["trace", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.csv");
    let o = lab(&["trace", "--profile", &path(&dir, "missing.csv"), "--t", "0", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.csv"));

    let o = lab(&["counterexample", "--s", "0", "--k-min", "5", "--k-max", "3", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let o = lab(&["counterexample", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));

    // a zero tolerance cannot be met by any fitted slope
    let o = lab(&[
        "counterexample", "--s", "0", "--k-min", "3", "--k-max", "5", "--nt", "32", "--band-cells", "64",
        "--x-points", "33", "--slope-tol", "0", "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let text = read(&out);
    assert!(text.starts_with("k,Rk,log2Rk\n3,"));
    let meta: serde_json::Value = serde_json::from_str(&read(&format!("{out}.meta.json"))).unwrap();
    assert!(meta["fits"]["slope"].is_f64());
    assert_eq!(meta["fits"]["expected_slope"], 0.25);
}

#[test]
fn lemma_csv_parses_back() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "l.csv");
    let o = lab(&["verify-lemmas", "--only", "NORM_EQUIV,L2_6", "--x-points", "1024", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["lemma_id", "profile_id", "params", "measured_lhs", "bound_rhs", "fitted_C", "pass"]
    );
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let id: LemmaId = rec[0].parse().unwrap();
        assert!(matches!(id, LemmaId::NormEquivalence | LemmaId::SquareFunction));
        let lhs: f64 = rec[3].parse().unwrap();
        let rhs: f64 = rec[4].parse().unwrap();
        assert_eq!(&rec[6], "true");
        assert!(lhs <= rhs);
        n += 1;
    }
    assert_eq!(n, 12 * 3);
}
