use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pzeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pzeta")).args(args).output().expect("binary runs")
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pzeta-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

fn without_wall(r: &Value) -> Value {
    let mut r = r.clone();
    r.as_object_mut().unwrap().remove("wall_ms");
    r
}

#[test]
fn full_suite_genus0_passes() {
    let p = write_config("g0.cfg", "[curve] q=2 e=1 genus=0\n[ideal A] gens=1\n[run] prec=64 seed=3\n");
    let out = pzeta(&["run", p.to_str().unwrap()]);
    let recs = records(&out);
    assert_eq!(recs.len(), 12, "one record per check");
    for r in &recs {
        assert_eq!(r["status"], "PASS", "{r}");
    }
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn full_suite_genus1_point_ideal_passes() {
    let p = write_config("g1.cfg", "[curve] q=2 e=1 genus=1 curve=0,0,1,0,0\n[ideal P] gens = x ; y\n[run] prec=64 seed=3\n");
    let out = pzeta(&["run", p.to_str().unwrap()]);
    let recs = records(&out);
    assert_eq!(recs.len(), 12);
    for r in &recs {
        assert_eq!(r["status"], "PASS", "{r}");
        assert_eq!(r["ideal"], "P");
    }
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn dependency_is_inserted_and_noted() {
    let p = write_config("dep.cfg", "[curve] q=3 genus=0\n[ideal A] gens=1\n[run] prec=32 checks=thmC\n");
    let out = pzeta(&["run", p.to_str().unwrap()]);
    let recs = records(&out);
    let ops: Vec<&str> = recs.iter().map(|r| r["op"].as_str().unwrap()).collect();
    assert_eq!(ops, ["reconstruct", "thmC"]);
    assert_eq!(recs[0]["note"], "inserted as dependency of thmC");
    assert!(recs[1].get("note").is_none());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let p = write_config("det.cfg", "[curve] q=2 genus=1 curve=0,0,1,0,0\n[ideal P] gens=x;y\n[run] prec=24 seed=11 checks=thmA,jm,goss\n");
    let a = records(&pzeta(&["run", p.to_str().unwrap()]));
    let b = records(&pzeta(&["run", p.to_str().unwrap()]));
    assert_eq!(a.iter().map(without_wall).collect::<Vec<_>>(), b.iter().map(without_wall).collect::<Vec<_>>());
}

#[test]
fn out_flag_writes_file() {
    let p = write_config("out.cfg", "[curve] q=2 genus=0\n[ideal A] gens=1\n[run] prec=16 checks=jm\n");
    let dest = p.with_extension("jsonl");
    let out = pzeta(&["run", p.to_str().unwrap(), "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&dest).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn config_errors_exit_3() {
    let p = write_config("sing.cfg", "[curve] q=2 e=1 genus=1 curve=0,0,0,0,0\n[ideal A] gens=1\n[run] prec=32\n");
    let out = pzeta(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular curve"));

    let p = write_config("chk.cfg", "[curve] q=2 genus=0\n[ideal A] gens=1\n[run] prec=32 checks=goss,nonsense\n");
    let out = pzeta(&["run", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown check 'nonsense'"));

    assert_eq!(pzeta(&["run", "/nonexistent/pzeta.cfg"]).status.code(), Some(3));
}

#[test]
fn special_membership_verdicts() {
    let base = ["special", "--genus", "1", "--curve", "0,0,1,0,0", "--ideal", "x;y", "--prec", "16"];
    let run = |lambda: &str| {
        let mut args = base.to_vec();
        args.extend(["--lambda", lambda]);
        String::from_utf8(pzeta(&args).stdout).unwrap()
    };
    assert!(run("y").contains("verdict: INTEGRAL"));
    assert!(run("1").contains("verdict: NON_INTEGRAL"));
}

#[test]
fn zeta_subcommand_prints_series() {
    let out = pzeta(&["zeta", "--q", "3", "--prec", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.trim_end().ends_with("prec=8"), "{s}");
}
