//! End-to-end tests against the installed binary: exit codes, report
//! shapes, determinism of the canonical JSON output.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use floq_core::bits::BitVec;
use floq_core::conjugacy::{check_reversible, Reversibility};
use floq_core::dense::DenseOperator;
use floq_core::genu::{build_exponential, GeneralisedUnitarySpec, LogicalPart};
use floq_core::group::StabiliserGroup;
use floq_core::pauli::PauliOperator;
use serde_json::{json, Value};

fn floq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floq"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).expect("scratch file writes");
    path
}

fn matrix_json(u: &DenseOperator) -> Value {
    let dim = 1usize << u.n();
    Value::Array(
        (0..dim)
            .map(|i| {
                Value::Array(
                    (0..dim)
                        .map(|j| {
                            let c = u.at(i, j);
                            json!([c.re, c.im])
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&floq(&["bogus"])), 2);
    assert_eq!(code(&floq(&["run"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let pair = write_file(dir.path(), "p.json", r#"{"catalog":"single_qubit_zx"}"#);
    let out = floq(&["verify-pair", "--input", pair.to_str().unwrap(), "--tol", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn catalog_list_names_every_entry() {
    let out = floq(&["catalog", "list"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let names: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"single_qubit_zx"));
    assert!(names.contains(&"two_qubit_logical"));
    assert!(names.contains(&"honeycomb_2x2"));
}

#[test]
fn verify_pair_accepts_the_catalog_pair() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "p.json",
        r#"{"catalog":"single_qubit_zx","transition":0}"#,
    );
    let out = floq(&["verify-pair", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], json!(true));
    assert_eq!(v["reversible"], json!(true));
    assert_eq!(v["identities"]["pass"], json!(true));
    // Floats are pinned to %.12e.
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.000000000000e-10"));
}

#[test]
fn verify_pair_rejects_commuting_quotients_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "p.json",
        r#"{"group_a":{"n":2,"generators":["+ZZ"]},"group_b":{"n":2,"generators":["+XX"]}}"#,
    );
    let out = floq(&["verify-pair", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], json!(false));
    assert_eq!(v["reversible"], json!(false));
    assert!(v["witness"]["element"]["pauli"].is_string());
}

#[test]
fn verify_pair_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "p.json", "{ not json");
    assert_eq!(code(&floq(&["verify-pair", "--input", input.to_str().unwrap()])), 2);
}

#[test]
fn verify_pair_flags_a_sign_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "p.json",
        r#"{"group_a":{"n":2,"generators":["+ZZ"]},"group_b":{"n":2,"generators":["-ZZ","+XX"]}}"#,
    );
    let out = floq(&["verify-pair", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["reversible"], json!(false));
    assert!(v["conflict"].as_str().unwrap().contains("sign"));
}

#[test]
fn run_with_forced_all_plus_keeps_signs_positive() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", r#"{"catalog":"two_qubit_logical"}"#);
    let out = floq(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--forced-outcomes",
        "++",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    for o in v["outcomes"].as_array().unwrap() {
        assert_eq!(o, &json!("+"));
    }
    for g in v["groups"].as_array().unwrap() {
        for gen in g["generators"].as_array().unwrap() {
            assert_eq!(gen["sign"], json!("+"));
        }
    }
    assert_eq!(v["action"]["preserves_symplectic_form"], json!(true));
}

#[test]
fn run_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", r#"{"catalog":"honeycomb_2x2"}"#);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let res = floq(&[
            "run",
            "--input",
            input.to_str().unwrap(),
            "--seed",
            "3",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 0);
        assert!(res.stdout.is_empty(), "--output keeps stdout quiet");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 12);
    assert_eq!(v["action"]["k"], json!(2));
    assert_eq!(v["action"]["preserves_symplectic_form"], json!(true));
}

#[test]
fn run_rejects_a_wrong_length_forced_stream() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", r#"{"catalog":"two_qubit_logical"}"#);
    let out = floq(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--forced-outcomes",
        "+",
    ]);
    assert_eq!(code(&out), 2);
    // Seed and forced stream are mutually exclusive.
    let out = floq(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "1",
        "--forced-outcomes",
        "++",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn run_flags_an_irreversible_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "s.json",
        r#"{"isgs":[{"n":2,"generators":["+ZZ"]},{"n":2,"generators":["+XX"]}]}"#,
    );
    let out = floq(&["run", "--input", input.to_str().unwrap(), "--seed", "0"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn export_import_run_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let catalog_ref = write_file(dir.path(), "ref.json", r#"{"catalog":"honeycomb_2x2"}"#);
    let exported = dir.path().join("exported.json");
    assert_eq!(
        code(&floq(&[
            "catalog",
            "export",
            "honeycomb_2x2",
            "--output",
            exported.to_str().unwrap(),
        ])),
        0
    );
    let from_ref = dir.path().join("ref_run.json");
    let from_file = dir.path().join("file_run.json");
    for (input, output) in [(&catalog_ref, &from_ref), (&exported, &from_file)] {
        let res = floq(&[
            "run",
            "--input",
            input.to_str().unwrap(),
            "--seed",
            "7",
            "--output",
            output.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 0);
    }
    assert_eq!(fs::read(&from_ref).unwrap(), fs::read(&from_file).unwrap());
}

#[test]
fn catalog_export_rejects_unknown_names() {
    assert_eq!(code(&floq(&["catalog", "export", "no_such_code"])), 2);
}

#[test]
fn check_locality_passes_the_honeycomb_for_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "s.json", r#"{"catalog":"honeycomb_2x2"}"#);
    let one = dir.path().join("one.json");
    let five = dir.path().join("five.json");
    for (threads, output) in [("1", &one), ("5", &five)] {
        let res = floq(&[
            "check-locality",
            "--input",
            input.to_str().unwrap(),
            "--threads",
            threads,
            "--output",
            output.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 0);
    }
    assert_eq!(fs::read(&one).unwrap(), fs::read(&five).unwrap());
    let v: Value = serde_json::from_slice(&fs::read(&one).unwrap()).unwrap();
    assert_eq!(v["pass"], json!(true));
    assert_eq!(v["transitions"].as_array().unwrap().len(), 3);
}

#[test]
fn check_locality_reports_violations() {
    // One wide check on a stretched two-site line: diameter 5 against
    // bound 1.
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "s.json",
        r#"{
            "isgs": [
                {"n":2,"generators":["+ZZ"]},
                {"n":2,"generators":["+XI"]}
            ],
            "lattice": {"dim":1,"positions":[[0.0],[5.0]]},
            "bound": 1.0
        }"#,
    );
    let out = floq(&["check-locality", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], json!(false));
    let violations = v["transitions"][0]["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert_eq!(violations[0]["diameter"], json!(5.0));
}

#[test]
fn genu_check_accepts_a_planted_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "g.json",
        r#"{"pair_ref":{"catalog":"two_qubit_logical"},"terms":[{"subset":"1","phi":0.7}]}"#,
    );
    let out = floq(&["genu", "check", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["conditions"], json!([true, true, true, true]));
    assert_eq!(v["pass"], json!(true));
}

#[test]
fn genu_decompose_recovers_the_planted_angle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "g.json",
        r#"{"pair_ref":{"catalog":"two_qubit_logical"},"terms":[{"subset":"1","phi":0.7}]}"#,
    );
    let out = floq(&["genu", "decompose", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["reconstruction_residual"].as_f64().unwrap() <= 1e-8);
    // Recovered canonical angles equal the planted spec's canonical
    // angles, and relate to the raw planted 0.7 by the mod-pi gauge.
    assert_eq!(v["angles"], v["input_angles"]);
    let angle = v["angles"][0]["angle"].as_f64().unwrap();
    let gap = (angle - 0.7).rem_euclid(PI);
    assert!(gap.min(PI - gap) < 1e-9, "angle {angle} is not 0.7 mod pi");
}

#[test]
fn genu_decompose_reports_no_terms_for_a_code_preserving_unitary() {
    // A rotation on the spectator qubit commutes with every measurement,
    // so the exponential part is empty.
    let u = DenseOperator::exp_i_theta_pauli(&PauliOperator::parse("+IZ").unwrap(), 0.4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let input = json!({
        "pair_ref": {"catalog": "two_qubit_logical"},
        "matrix": matrix_json(&u),
    });
    let path = write_file(dir.path(), "g.json", &input.to_string());
    let out = floq(&["genu", "decompose", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], json!(true));
    assert_eq!(v["terms"], json!([]));
    assert_eq!(v["angles"], json!([]));
}

#[test]
fn genu_check_flags_a_perturbed_unitary() {
    // Pair with a nontrivial intersection; nudge a planted exponential
    // by a rotation that anticommutes with the intersection generator.
    let a = StabiliserGroup::new(
        2,
        vec![
            PauliOperator::parse("+ZI").unwrap(),
            PauliOperator::parse("+IZ").unwrap(),
        ],
    )
    .unwrap();
    let b = StabiliserGroup::new(
        2,
        vec![
            PauliOperator::parse("+ZI").unwrap(),
            PauliOperator::parse("+IX").unwrap(),
        ],
    )
    .unwrap();
    let pair = match check_reversible(&a, &b).unwrap() {
        Reversibility::Reversible(p) => p,
        Reversibility::NotReversible(_) => panic!("pair is reversible"),
    };
    let spec = GeneralisedUnitarySpec::new(
        pair,
        vec![(BitVec::from_indices(1, &[0]), 0.7)],
        0.0,
        LogicalPart::Identity,
    )
    .unwrap();
    let u = build_exponential(&spec).unwrap();
    let nudge =
        DenseOperator::exp_i_theta_pauli(&PauliOperator::parse("+XI").unwrap(), 0.3).unwrap();
    let perturbed = nudge.mul(&u).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let input = json!({
        "pair_ref": {
            "group_a": {"n": 2, "generators": ["+ZI", "+IZ"]},
            "group_b": {"n": 2, "generators": ["+ZI", "+IX"]},
        },
        "matrix": matrix_json(&perturbed),
    });
    let path = write_file(dir.path(), "g.json", &input.to_string());
    let out = floq(&["genu", "check", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], json!(false));
    let conditions: Vec<bool> = v["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_bool().unwrap())
        .collect();
    assert!(conditions.contains(&false));
    assert!(v["residuals"]["detectability"].as_f64().unwrap() > 1e-3);
}

#[test]
fn oracle_verify_passes_and_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "o.json",
        r#"{"pair_ref":{"catalog":"two_qubit_logical"},"states":12}"#,
    );
    let one = dir.path().join("one.json");
    let three = dir.path().join("three.json");
    for (threads, output) in [("1", &one), ("3", &three)] {
        let res = floq(&[
            "oracle",
            "verify",
            "--input",
            input.to_str().unwrap(),
            "--seed",
            "9",
            "--threads",
            threads,
            "--output",
            output.to_str().unwrap(),
        ]);
        assert_eq!(code(&res), 0);
    }
    assert_eq!(fs::read(&one).unwrap(), fs::read(&three).unwrap());
    let v: Value = serde_json::from_slice(&fs::read(&one).unwrap()).unwrap();
    assert_eq!(v["identities"]["pass"], json!(true));
    assert_eq!(v["uniform"]["pass"], json!(true));
    assert_eq!(v["uniform"]["states"], json!(12));
}
