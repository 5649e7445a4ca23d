use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jordan-spectral")).args(args).env_remove("JORDAN_SPECTRAL_THREADS").output().unwrap()
}

fn schema() -> jsonschema::Validator {
    let out = bin(&["--schema"]);
    assert_eq!(out.status.code(), Some(0));
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn report(args: &[&str], code: i32) -> Value {
    let out = bin(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    v
}

#[test]
fn reports_validate_against_the_schema() {
    let v = report(&["verify-algebra", "--builtin", "j3o", "--identity", "jordan"], 0);
    assert_eq!(v["task"], "verify-algebra");
    assert_eq!(v["result"]["check"]["violations"], 0);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    let v = report(&["solve-derivations", "--points", "1"], 0);
    assert_eq!(v["result"]["kernel_dim"], 1);
    assert_eq!(v["certificate"]["conclusive"], true);
    report(&["classify-homs", "--base", "j2", "--points", "2", "--source", "1-2,2-2", "--target", "1-2=2,2-2"], 0);
    report(&["oneform-span", "--points", "1"], 0);
}

#[test]
fn verification_failure_exits_two_with_witness() {
    let v = report(&["verify-algebra", "--builtin", "j3o", "--identity", "associative_rep"], 2);
    assert_eq!(v["result"]["pass"], false);
    assert!(v["result"]["check"]["sweep"]["witnesses"][0]["tuple"].is_array());
    let v = report(&["verify-algebra", "--builtin", "m2", "--identity", "commutative"], 2);
    assert!(v["result"]["check"]["witnesses"][0].is_object());
}

#[test]
fn reruns_are_byte_identical_apart_from_timings() {
    let strip = |o: Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["timings"] = Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    let args = ["classify-homs", "--suite"];
    assert_eq!(strip(bin(&args)), strip(bin(&args)));
    let raw = String::from_utf8(bin(&args).stdout).unwrap();
    let keys: Vec<&str> = raw.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn usage_errors_exit_one_on_stderr() {
    for args in [
        &["--bogus"][..],
        &["solve-derivations"],
        &["solve-derivations", "--points", "0"],
        &["solve-derivations", "--points", "2", "--sectors", "1-3"],
        &["distance", "--kappa", "0"],
        &["distance", "--kappa", "x"],
        &["verify-algebra", "--builtin", "j3o", "--identity", "alternative"],
        &["verify-algebra", "--file", "/nonexistent/algebra.json"],
        &[],
    ] {
        let out = bin(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    for args in [["--help"], ["--version"]] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(0));
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_jordan-spectral"))
            .args(["inner-derivations", "--points", "1"])
            .env("JORDAN_SPECTRAL_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, bad) = (run("1"), run("zero"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn algebra_files_are_accepted() {
    let dir = std::env::temp_dir().join(format!("jordan-spectral-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("j2.json");
    std::fs::write(&path, jordan_spectral::algebra::serialize_algebra(&jordan_spectral::algebra::symmetric_2x2())).unwrap();
    let v = report(&["verify-algebra", "--file", path.to_str().unwrap(), "--identity", "jordan"], 0);
    assert_eq!(v["result"]["dim"], 3);
    std::fs::remove_dir_all(dir).unwrap();
}
