//! One function per subcommand. Each builds a report `Value`, emits it
//! and returns whether every check passed; hard failures come back as
//! `CliError` and skip the report entirely.

use std::path::Path;

use floq_core::catalog;
use floq_core::conjugacy::{check_reversible, ConjugatePair, Reversibility};
use floq_core::dense::{self, DenseState, MAX_MATRIX_QUBITS};
use floq_core::error::Error;
use floq_core::floquet::RunRecord;
use floq_core::genu::{build_exponential, check_conditions, decompose_canonical};
use floq_core::lattice::{check_local_reversibility, Lattice};
use floq_core::outcome::OutcomeSource;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Map, Value};

use crate::io::{
    bitvec_string, check_failure, emit, expect_f64, expect_usize, group_json, lattice_json,
    mask_string, parse_forced, parse_genu_input, parse_group, parse_lattice, parse_pair_source,
    parse_sequence, pauli_json, pauli_list_json, read_json, sign_str, usage, CliError,
    UnitaryInput,
};

/// Dense-oracle failures at config time (size caps, shape mismatches)
/// are usage errors; anything else means a check ran and failed.
fn classify(e: Error) -> CliError {
    match e {
        Error::TooLarge { .. } | Error::LengthMismatch { .. } | Error::BadParameter(_) => {
            usage(e)
        }
        other => check_failure(other),
    }
}

fn require_positive(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(usage("tolerance must be a positive number"))
    }
}

// ---------------------------------------------------------------------------
// verify-pair

pub fn verify_pair(input: &Path, tol: f64, output: Option<&Path>) -> Result<bool, CliError> {
    require_positive(tol)?;
    let v = read_json(input)?;
    let m = v
        .as_object()
        .ok_or_else(|| usage("input must be a JSON object"))?;

    // Geometry can ride along with either input form.
    let mut lattice = match m.get("lattice") {
        Some(l) => Some(parse_lattice(l, "lattice")?),
        None => None,
    };
    let mut bound = match m.get("bound") {
        Some(b) => Some(expect_f64(b, "bound")?),
        None => None,
    };
    if lattice.is_some() != bound.is_some() {
        return Err(usage("\"lattice\" and \"bound\" must be given together"));
    }

    let mut report = Map::new();
    report.insert("command".into(), json!("verify-pair"));
    report.insert("tol".into(), json!(tol));

    let verdict = if m.contains_key("catalog") {
        let pair = parse_pair_source(&v, "input")?;
        if lattice.is_none() {
            // Catalog sequences carry their own geometry when they have one.
            let seq = parse_sequence(&v)?;
            lattice = seq.lattice;
            bound = seq.bound;
        }
        Ok(Reversibility::Reversible(pair))
    } else {
        let a = parse_group(
            m.get("group_a")
                .ok_or_else(|| usage("input needs \"group_a\" and \"group_b\" or \"catalog\""))?,
            "group_a",
        )?;
        let b = parse_group(
            m.get("group_b")
                .ok_or_else(|| usage("input needs \"group_a\" and \"group_b\" or \"catalog\""))?,
            "group_b",
        )?;
        report.insert("rank_a".into(), json!(a.rank()));
        report.insert("rank_b".into(), json!(b.rank()));
        check_reversible(&a, &b)
    };

    let mut pass = true;
    match verdict {
        Err(e) => {
            // Typically a sign conflict: the groups share an unsigned
            // element with opposite signs, so no transition exists.
            pass = false;
            report.insert("reversible".into(), json!(false));
            report.insert("conflict".into(), json!(e.to_string()));
        }
        Ok(Reversibility::NotReversible(w)) => {
            pass = false;
            report.insert("reversible".into(), json!(false));
            report.insert(
                "witness".into(),
                json!({
                    "element": pauli_json(&w.element),
                    "side": if w.from_a { "a" } else { "b" },
                    "commutation": bitvec_string(&w.commutation),
                }),
            );
        }
        Ok(Reversibility::Reversible(pair)) => {
            report.insert("reversible".into(), json!(true));
            report.insert("n".into(), json!(pair.n()));
            report.insert("pair".into(), pair_audit_json(&pair));
            if let (Some(lat), Some(l)) = (&lattice, bound) {
                let loc = check_local_reversibility(&pair, lat, l).map_err(classify)?;
                pass &= loc.pass();
                report.insert(
                    "locality".into(),
                    json!({
                        "bound": l,
                        "max_diameter": loc.max_diameter,
                        "pass": loc.pass(),
                        "violations": loc.violations.iter().map(|x| json!({
                            "side": if x.side_a { "a" } else { "b" },
                            "index": x.index,
                            "diameter": x.diameter,
                        })).collect::<Vec<_>>(),
                    }),
                );
            } else {
                report.insert("locality".into(), Value::Null);
            }
            if pair.n() <= MAX_MATRIX_QUBITS {
                let rep = dense::verify_pair_identities(&pair, tol).map_err(classify)?;
                pass &= rep.pass();
                report.insert(
                    "identities".into(),
                    json!({
                        "n_m": rep.n_m,
                        "combos": rep.combos,
                        "max_residual_a_side": rep.max_residual_a_side,
                        "max_residual_b_side": rep.max_residual_b_side,
                        "pass": rep.pass(),
                    }),
                );
            } else {
                report.insert("identities".into(), Value::Null);
            }
        }
    }

    report.insert("pass".into(), json!(pass));
    emit(&Value::Object(report), output)?;
    Ok(pass)
}

/// Full pair dump: bases, intersection, and the quotient commutation
/// matrix before re-basing next to the (identity) matrix after.
fn pair_audit_json(pair: &ConjugatePair) -> Value {
    let n_m = pair.n_m();
    let after: Vec<String> = pair
        .basis_a()
        .iter()
        .map(|a| {
            (0..n_m)
                .map(|j| if a.sympl(&pair.basis_b()[j]) == 1 { '1' } else { '0' })
                .collect()
        })
        .collect();
    json!({
        "n_m": n_m,
        "intersection": pauli_list_json(pair.intersection().generators()),
        "basis_a": pauli_list_json(pair.basis_a()),
        "basis_b": pauli_list_json(pair.basis_b()),
        "commutation_before": pair
            .commutation_before()
            .iter()
            .map(bitvec_string)
            .collect::<Vec<_>>(),
        "commutation_after": after,
    })
}

// ---------------------------------------------------------------------------
// run

pub fn run(
    input: &Path,
    seed: Option<u64>,
    forced: Option<&str>,
    output: Option<&Path>,
) -> Result<bool, CliError> {
    let v = read_json(input)?;
    let parsed = parse_sequence(&v)?;
    let seq = if parsed.seq.lattice().is_none() {
        match (parsed.lattice, parsed.bound) {
            // Attaching enforces the bound, so a violating file fails here.
            (Some(lat), Some(l)) => parsed
                .seq
                .with_lattice(lat, l)
                .map_err(|e| check_failure(format!("invalid sequence: {e}")))?,
            _ => parsed.seq,
        }
    } else {
        parsed.seq
    };

    let mut source = match forced {
        Some(s) => {
            let signs = parse_forced(s)?;
            if signs.len() != seq.total_measurements() {
                return Err(usage(format!(
                    "forced stream has {} outcomes, the sequence consumes {}",
                    signs.len(),
                    seq.total_measurements()
                )));
            }
            OutcomeSource::forced(signs)
        }
        None => OutcomeSource::seeded(seed.unwrap_or(0)),
    };

    let mut report = Map::new();
    report.insert("command".into(), json!("run"));
    report.insert("n".into(), json!(seq.n()));
    report.insert("tau".into(), json!(seq.tau()));
    report.insert("periodic".into(), json!(seq.is_periodic()));
    match forced {
        Some(s) => {
            report.insert("forced".into(), json!(s));
            report.insert("seed".into(), Value::Null);
        }
        None => {
            report.insert("forced".into(), Value::Null);
            report.insert("seed".into(), json!(seed.unwrap_or(0)));
        }
    }

    let record: RunRecord;
    if seq.is_periodic() {
        let period = seq.period_action(&mut source).map_err(check_failure)?;
        report.insert(
            "action".into(),
            json!({
                "k": period.action.k,
                "symplectic": period.action.symplectic.rows.iter()
                    .map(bitvec_string).collect::<Vec<_>>(),
                "phases": period.action.phases.iter()
                    .map(|s| sign_str(*s)).collect::<Vec<_>>(),
                "preserves_symplectic_form": period.action.preserves_symplectic_form(),
                "identity": period.action.is_identity(),
            }),
        );
        report.insert("frame".into(), pauli_json(&period.frame));
        record = period.record;
    } else {
        record = seq.run(&mut source).map_err(check_failure)?;
        report.insert("action".into(), Value::Null);
        report.insert("frame".into(), Value::Null);
    }

    report.insert("k".into(), json!(record.k));
    report.insert(
        "outcomes".into(),
        json!(record
            .outcomes
            .iter()
            .map(|s| sign_str(*s))
            .collect::<Vec<_>>()),
    );
    report.insert(
        "groups".into(),
        Value::Array(record.groups.iter().map(group_json).collect()),
    );
    report.insert(
        "initial_logicals".into(),
        pauli_list_json(&record.initial_logicals),
    );
    report.insert(
        "final_logicals".into(),
        pauli_list_json(&record.final_logicals),
    );
    report.insert("pass".into(), json!(true));

    emit(&Value::Object(report), output)?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// check-locality

pub fn check_locality(
    input: &Path,
    threads: usize,
    output: Option<&Path>,
) -> Result<bool, CliError> {
    let v = read_json(input)?;
    let parsed = parse_sequence(&v)?;
    let lat: Lattice = parsed
        .lattice
        .ok_or_else(|| usage("sequence has no lattice; add \"lattice\" and \"bound\""))?;
    let bound = parsed.bound.expect("bound accompanies lattice");
    let seq = parsed.seq;

    let reports = parallel_map(threads, seq.pairs(), |_, pair| {
        check_local_reversibility(pair, &lat, bound)
    });

    let mut pass = true;
    let mut transitions = Vec::with_capacity(reports.len());
    for (index, r) in reports.into_iter().enumerate() {
        let r = r.map_err(classify)?;
        pass &= r.pass();
        transitions.push(json!({
            "index": index,
            "n_m": seq.pairs()[index].n_m(),
            "max_diameter": r.max_diameter,
            "pass": r.pass(),
            "violations": r.violations.iter().map(|x| json!({
                "side": if x.side_a { "a" } else { "b" },
                "index": x.index,
                "diameter": x.diameter,
            })).collect::<Vec<_>>(),
        }));
    }

    let report = json!({
        "command": "check-locality",
        "pass": pass,
        "bound": bound,
        "n": seq.n(),
        "tau": seq.tau(),
        "transitions": transitions,
    });
    emit(&report, output)?;
    Ok(pass)
}

// ---------------------------------------------------------------------------
// genu check / decompose

pub fn genu(
    decompose: bool,
    input: &Path,
    tol: f64,
    output: Option<&Path>,
) -> Result<bool, CliError> {
    require_positive(tol)?;
    let v = read_json(input)?;
    let (pair, unitary) = parse_genu_input(&v)?;

    let (u, source_kind, planted) = match unitary {
        UnitaryInput::Spec(spec) => {
            let u = build_exponential(&spec).map_err(classify)?;
            let planted: Vec<Value> = spec
                .canonical_angles()
                .iter()
                .map(|(mask, angle)| {
                    json!({ "subset": mask_string(*mask, pair.n_m()), "angle": angle })
                })
                .collect();
            (u, "terms", Some(planted))
        }
        UnitaryInput::Matrix(m) => (m, "matrix", None),
    };

    let rep = check_conditions(&pair, &u, tol).map_err(classify)?;
    let mut pass = rep.pass();

    let mut report = Map::new();
    report.insert(
        "command".into(),
        json!(if decompose { "genu-decompose" } else { "genu-check" }),
    );
    report.insert("n".into(), json!(pair.n()));
    report.insert("n_m".into(), json!(pair.n_m()));
    report.insert("tol".into(), json!(tol));
    report.insert("source".into(), json!(source_kind));
    report.insert("conditions".into(), json!(rep.conditions()));
    report.insert(
        "residuals".into(),
        json!({
            "detectability": rep.detectability_residual,
            "preservation": rep.preservation_residual,
            "isometry": rep.isometry_residual,
            "equivalence": rep.equivalence_residual,
            "unimodularity": rep.unimodularity_residual,
            "probability": rep.probability_residual,
        }),
    );
    if let Some(p) = planted {
        report.insert("input_angles".into(), Value::Array(p));
    }

    if decompose {
        let mut angles = Value::Null;
        let mut terms = Value::Null;
        let mut global_phase = Value::Null;
        let mut residual = Value::Null;
        if pass {
            match decompose_canonical(&pair, &u, tol) {
                Ok(spec) => {
                    let n_m = pair.n_m();
                    angles = Value::Array(
                        spec.canonical_angles()
                            .iter()
                            .map(|(mask, angle)| {
                                json!({ "subset": mask_string(*mask, n_m), "angle": angle })
                            })
                            .collect(),
                    );
                    terms = Value::Array(
                        spec.b_terms()
                            .iter()
                            .map(|t| {
                                json!({
                                    "subset": bitvec_string(&t.subset),
                                    "angle": t.angle,
                                    "transversal": t.transversal,
                                })
                            })
                            .collect(),
                    );
                    global_phase = json!(spec.global_phase());
                    residual = json!(rebuild_residual(&pair, &spec, &u)?);
                }
                Err(Error::Reconstruction { residual: r, phases }) => {
                    pass = false;
                    residual = json!(r);
                    angles = Value::Array(
                        phases
                            .iter()
                            .map(|(mask, angle)| {
                                json!({ "subset": mask_string(*mask, pair.n_m()), "angle": angle })
                            })
                            .collect(),
                    );
                }
                Err(e) => return Err(classify(e)),
            }
        } else {
            pass = false;
        }
        report.insert("angles".into(), angles);
        report.insert("terms".into(), terms);
        report.insert("global_phase".into(), global_phase);
        report.insert("reconstruction_residual".into(), residual);
    }

    report.insert("pass".into(), json!(pass));
    emit(&Value::Object(report), output)?;
    Ok(pass)
}

/// `|| rebuild Pi_A - u Pi_A ||`: how well the recovered product form
/// reproduces the input where it is defined.
fn rebuild_residual(
    pair: &ConjugatePair,
    spec: &floq_core::genu::GeneralisedUnitarySpec,
    u: &floq_core::dense::DenseOperator,
) -> Result<f64, CliError> {
    let rebuild = build_exponential(spec).map_err(classify)?;
    let proj = dense::projector(pair.group_a(), 0).map_err(classify)?;
    let lhs = rebuild.mul(&proj).map_err(classify)?;
    let rhs = u.mul(&proj).map_err(classify)?;
    lhs.distance(&rhs).map_err(classify)
}

// ---------------------------------------------------------------------------
// oracle verify

pub fn oracle_verify(
    input: &Path,
    seed: u64,
    tol: f64,
    threads: usize,
    output: Option<&Path>,
) -> Result<bool, CliError> {
    require_positive(tol)?;
    let v = read_json(input)?;
    let m = v
        .as_object()
        .ok_or_else(|| usage("input must be a JSON object"))?;
    let pair = if m.contains_key("pair_ref") {
        parse_pair_source(m.get("pair_ref").unwrap(), "pair_ref")?
    } else {
        parse_pair_source(&v, "input")?
    };
    let states = match m.get("states") {
        Some(s) => expect_usize(s, "states")?,
        None => 50,
    };

    let identities = dense::verify_pair_identities(&pair, tol).map_err(classify)?;

    // One independent generator per state keeps the sweep identical for
    // every thread count.
    let indices: Vec<usize> = (0..states).collect();
    let deviations = parallel_map(threads, &indices, |_, &i| -> Result<f64, Error> {
        let stream = seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut rng = ChaCha12Rng::seed_from_u64(stream);
        let state = DenseState::random_codespace(pair.group_a(), &mut rng)?;
        let rep = dense::uniform_probability_check(&pair, &state, tol)?;
        Ok(rep.max_deviation)
    });
    let mut max_deviation = 0.0f64;
    for d in deviations {
        max_deviation = max_deviation.max(d.map_err(classify)?);
    }

    let expected = 0.5f64.powi(pair.n_m() as i32);
    let uniform_pass = max_deviation <= tol;
    let pass = identities.pass() && uniform_pass;
    let report = json!({
        "command": "oracle-verify",
        "pass": pass,
        "tol": tol,
        "seed": seed,
        "n": pair.n(),
        "n_m": pair.n_m(),
        "identities": {
            "combos": identities.combos,
            "max_residual_a_side": identities.max_residual_a_side,
            "max_residual_b_side": identities.max_residual_b_side,
            "pass": identities.pass(),
        },
        "uniform": {
            "states": states,
            "expected": expected,
            "max_deviation": max_deviation,
            "pass": uniform_pass,
        },
    });
    emit(&report, output)?;
    Ok(pass)
}

// ---------------------------------------------------------------------------
// catalog

pub fn catalog_list(output: Option<&Path>) -> Result<bool, CliError> {
    let entries: Vec<Value> = catalog::entries()
        .iter()
        .map(|e| {
            let seq = e.build();
            json!({
                "name": e.name,
                "summary": e.summary,
                "n": seq.n(),
                "tau": seq.tau(),
                "k": seq.isgs()[0].k(),
                "total_measurements": seq.total_measurements(),
                "periodic": seq.is_periodic(),
                "bound": seq.locality_bound(),
            })
        })
        .collect();
    let report = json!({
        "command": "catalog-list",
        "pass": true,
        "entries": entries,
    });
    emit(&report, output)?;
    Ok(true)
}

pub fn catalog_export(name: &str, output: Option<&Path>) -> Result<bool, CliError> {
    let entry = catalog::entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            let names: Vec<&str> = catalog::entries().iter().map(|e| e.name).collect();
            usage(format!(
                "unknown catalog entry \"{name}\"; available: {}",
                names.join(", ")
            ))
        })?;
    let seq = entry.build();

    let mut file = Map::new();
    file.insert("name".into(), json!(entry.name));
    file.insert("summary".into(), json!(entry.summary));
    file.insert(
        "isgs".into(),
        Value::Array(seq.isgs().iter().map(group_json).collect()),
    );
    file.insert(
        "transitions".into(),
        Value::Array(
            seq.pairs()
                .iter()
                .map(|p| {
                    json!({
                        "basis_a": pauli_list_json(p.basis_a()),
                        "basis_b": pauli_list_json(p.basis_b()),
                    })
                })
                .collect(),
        ),
    );
    if let (Some(lat), Some(bound)) = (seq.lattice(), seq.locality_bound()) {
        file.insert("lattice".into(), lattice_json(lat));
        file.insert("bound".into(), json!(bound));
    }

    emit(&Value::Object(file), output)?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// Scoped-thread fan-out

/// Apply `f` to every item, splitting the slice across up to `threads`
/// scoped workers. Results come back in input order, so the report is
/// identical for every thread count.
fn parallel_map<T, U, F>(threads: usize, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (ci, (islice, oslice)) in items.chunks(chunk).zip(out.chunks_mut(chunk)).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (j, (item, slot)) in islice.iter().zip(oslice.iter_mut()).enumerate() {
                    *slot = Some(f(ci * chunk + j, item));
                }
            });
        }
    });
    out.into_iter()
        .map(|o| o.expect("every chunk is visited"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::parallel_map;

    #[test]
    fn fan_out_preserves_order_for_any_thread_count() {
        let items: Vec<usize> = (0..13).collect();
        let expect: Vec<usize> = items.iter().map(|x| x * x).collect();
        for threads in [1, 2, 3, 8, 64] {
            assert_eq!(parallel_map(threads, &items, |_, &x| x * x), expect);
        }
    }
}
