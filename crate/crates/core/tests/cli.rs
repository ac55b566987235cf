use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn goldweight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goldweight")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x");
    assert_eq!(goldweight(&["compute", "--limit", "3", "--out", &out]).status.code(), Some(2));
    assert_eq!(goldweight(&["compute", "--method", "spectral"]).status.code(), Some(2));
    assert_eq!(goldweight(&["hooley", "--omega", "0"]).status.code(), Some(2));
    assert_eq!(goldweight(&["report", "--limits", "1024,512"]).status.code(), Some(2));
    assert_eq!(goldweight(&["compute", "--out", "/nonexistent-dir/x.csv", "--limit", "64"]).status.code(), Some(3));
    assert_eq!(goldweight(&["verify", "--quick"]).status.code(), Some(0));
    let bad = goldweight(&["verify", "--quick", "--inject-fault", "r-table"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("stored r(p-1)"));
}

#[test]
fn compute_row_count_and_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "direct.csv");
    let b = path(dir.path(), "conv.csv");
    assert!(goldweight(&["compute", "--limit", "16384", "--method", "direct", "--out", &a]).status.success());
    assert!(goldweight(&["compute", "--limit", "16384", "--method", "convolution", "--out", &b]).status.success());
    let ta = fs::read_to_string(&a).unwrap();
    let tb = fs::read_to_string(&b).unwrap();
    assert_eq!(ta.lines().count(), 2 + 8191);
    for (la, lb) in ta.lines().zip(tb.lines()).skip(2) {
        let va: Vec<f64> = la.split(',').map(|x| x.parse().unwrap()).collect();
        let vb: Vec<f64> = lb.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(va[0], vb[0]);
        for (x, y) in va[1..].iter().zip(&vb[1..]) {
            assert!((x - y).abs() <= f64::max(1e-6, 1e-9 * x.abs()), "{la} vs {lb}");
        }
    }
}

#[test]
fn direct_outputs_do_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["compute", "mainterm"] {
        let a = path(dir.path(), &format!("{cmd}1.csv"));
        let b = path(dir.path(), &format!("{cmd}3.csv"));
        assert!(goldweight(&[cmd, "--limit", "30000", "--workers", "1", "--out", &a]).status.success());
        assert!(goldweight(&[cmd, "--limit", "30000", "--workers", "3", "--out", &b]).status.success());
        let ta = fs::read_to_string(&a).unwrap();
        let tb = fs::read_to_string(&b).unwrap();
        // only the embedded config (workers) differs
        assert_ne!(ta.lines().next(), tb.lines().next());
        assert!(ta.lines().skip(1).eq(tb.lines().skip(1)));
    }
}

#[test]
fn report_default_grid_has_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "r.json");
    assert!(goldweight(&["report", "--out", &out]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rows = v["report"]["rows_per_N"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(v["config"]["limits"].as_array().unwrap().len(), 4);
    for r in rows {
        assert_eq!(r["lemmas"].as_array().unwrap().len(), 4);
        assert!(r["exceptional_count"].as_u64().unwrap() <= r["n_limit"].as_u64().unwrap() / 2);
    }
}

#[test]
fn hooley_lemma4_measured_is_integer() {
    let out = goldweight(&["hooley", "--lemma", "4", "--omega", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = v["reports"][0]["measured"].as_f64().unwrap();
    assert_eq!(m.fract(), 0.0);
    assert_eq!(v["reports"][0]["lemma"], "L4");
}

#[test]
fn sieve_writes_cache_that_compute_reuses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = path(dir.path(), "cache");
    let out = goldweight(&["sieve", "--limit", "100000", "--cache", &cache]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["prime_count"], 9592);
    let file = dir.path().join("cache").join("primes_100000.gwsv");
    assert_eq!(&fs::read(&file).unwrap()[..4], b"GWSV");
    let csv = path(dir.path(), "c.csv");
    assert!(goldweight(&["compute", "--limit", "100000", "--cache", &cache, "--out", &csv]).status.success());
    // a corrupt cache is a format error
    fs::write(&file, b"GWSVjunk").unwrap();
    assert_eq!(goldweight(&["compute", "--limit", "100000", "--cache", &cache]).status.code(), Some(2));
}
