use std::fs;
use std::path::PathBuf;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.stdout))
    }
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["procontra"];
    argv.extend_from_slice(args);
    let code = procontra_cli::run(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn example_padic_reproduces_values() {
    for p in ["2", "3"] {
        let r = run(&["example-padic", "--prime", p]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let v = r.json();
        assert_eq!(v["verdict"], "pass");
        assert_eq!(v["backend"], "z");
        let res = &v["result"];
        assert_eq!(res["kernel_strict_zero"], true);
        assert_eq!(res["adic_limit_rank"], 0);
        assert_eq!(res["constant_limit_rank"], 1);
        assert_eq!(res["limit_map"]["kernel_rank"], 1);
        assert!(res["adic_level_ranks"].as_array().unwrap().iter().all(|r| r == 0));
    }
}

#[test]
fn non_primes_are_rejected() {
    for args in [["example-padic", "--prime", "4"], ["product-check", "--prime", "1"]] {
        let r = run(&args);
        assert_eq!(r.code, 2);
        assert!(r.stderr.contains("not a prime"), "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["xi-hom"]).code, 2);
    assert_eq!(run(&["product-check", "--depth", "0"]).code, 2);
    assert_eq!(run(&["product-check", "--backend", "z"]).code, 2);
    assert_eq!(run(&["example-padic", "--backend", "padic"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn xi_hom_three_way_agreement() {
    let r = run(&["xi-hom", "--fixture", &fixture("xi-hom-zp-xi-zp2.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["verdict"], "pass");
    let c = &v["result"]["contraderived"];
    // Hom(Z/4, Z/2) = Z/2 in every column
    for g in [&c["path_i"], &c["path_ii"], &v["result"]["oracle"]] {
        assert_eq!(g["exponents"], serde_json::json!([1]));
    }
    assert_eq!(v["depth"], c["certified_depth"]);
    assert!(v["battery"]["start_depth"].is_u64());
    let r = run(&["xi-hom", "--fixture", &fixture("xi-hom-two-term.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn malformed_fixtures_point_at_the_problem() {
    let r = run(&["xi-hom", "--fixture", &fixture("malformed-xi-hom.json")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("schema error at /m/terms/0/gens"), "{}", r.stderr);

    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{\"schema\": \"procontra/flatness/v1\", \"coefficient\": {\"contra\": \"free\", \"backend\": {\"kind\": \"padic\", \"prime\": 2}, \"rank\": 1}, \"extra\": 1}", "/extra"),
        ("{\"coefficient\": {}}", "/schema"),
        ("{\"schema\": \"procontra/flatness/v1\", \"coefficient\": {\"contra\": \"free\", \"backend\": {\"kind\": \"padic\", \"prime\": 6}, \"rank\": 1}}", "/coefficient/backend"),
        ("[1, 2", "schema error at : "),
    ];
    for (i, (body, pointer)) in cases.iter().enumerate() {
        let p = write_temp(&dir, &format!("bad{i}.json"), body);
        let r = run(&["flatness", "--fixture", &p]);
        assert_eq!(r.code, 2, "{body}");
        assert!(r.stderr.contains(pointer), "{body}: {}", r.stderr);
    }
    let p = write_temp(
        &dir,
        "bad-complex.json",
        r#"{"schema": "procontra/periodicity/v1", "complex": {"backend": {"kind": "padic", "prime": 2}, "ranks": [1, 1, 1],
            "diffs": [{"level": "inf", "entries": [["1"]]}, {"level": "inf", "entries": [["1"]]}]}}"#,
    );
    let r = run(&["periodicity", "--fixture", &p]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("schema error at /complex"), "{}", r.stderr);
}

#[test]
fn flatness_verdicts() {
    let r = run(&["flatness", "--fixture", &fixture("flatness-ring.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.json()["battery"]["sequences"].as_u64().unwrap() > 0);
    let r = run(&["flatness", "--fixture", &fixture("flatness-z-mod-p.json")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["pass"], false);

    let dir = tempfile::tempdir().unwrap();
    let body = fs::read_to_string(fixture("flatness-z-mod-p.json")).unwrap().replace("\"expect_flat\": false", "\"expect_flat\": true");
    let p = write_temp(&dir, "expect-flat.json", &body);
    let r = run(&["flatness", "--fixture", &p]);
    assert_eq!(r.code, 1);
    let v = r.json();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["witness"]["level"], 2);
}

#[test]
fn periodicity_verdicts() {
    let r = run(&["periodicity", "--fixture", &fixture("periodicity-contractible.json"), "--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["verdict"], "pass");
    assert!(v["result"]["null_homotopy"].is_array());
    assert_eq!(v["battery"]["seed"], 3);
    let r = run(&["periodicity", "--fixture", &fixture("periodicity-not-acyclic.json")]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["witness"]["pure_acyclicity"]["module"], "Z/2^1");
}

#[test]
fn product_check_passes() {
    let r = run(&["product-check", "--seed", "0", "--depth", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["depth"], 4);
    for b in [["--backend", "pseries"], ["--backend", "padic"]] {
        let r = run(&["product-check", "--seed", "5", b[0], b[1], "--prime", "3"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
}

#[test]
fn reports_are_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["example-padic".into()],
        vec!["xi-hom".into(), "--fixture".into(), fixture("xi-hom-two-term.json")],
        vec!["flatness".into(), "--fixture".into(), fixture("flatness-ring.json")],
        vec!["periodicity".into(), "--fixture".into(), fixture("periodicity-contractible.json"), "--seed".into(), "7".into()],
        vec!["product-check".into(), "--seed".into(), "11".into()],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let (first, second) = (run(&a), run(&a));
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        let v = first.json();
        for key in ["verdict", "depth", "battery", "requested_depth", "seed"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
        let out = dir.path().join(format!("r{i}.json"));
        let mut b = a.clone();
        let out_s = out.display().to_string();
        b.extend(["--out", out_s.as_str()]);
        let r = run(&b);
        assert!(r.stdout.is_empty());
        assert_eq!(fs::read_to_string(&out).unwrap(), first.stdout);
    }
}

#[test]
fn fixture_backend_must_match_flags() {
    let r = run(&["xi-hom", "--fixture", &fixture("xi-hom-zp-xi-zp2.json"), "--prime", "3"]);
    assert_eq!(r.code, 2);
    let r = run(&["xi-hom", "--fixture", &fixture("xi-hom-zp-xi-zp2.json"), "--backend", "pseries"]);
    assert_eq!(r.code, 2);
    let r = run(&["xi-hom", "--fixture", &fixture("xi-hom-zp-xi-zp2.json"), "--backend", "padic", "--prime", "2"]);
    assert_eq!(r.code, 0);
}
