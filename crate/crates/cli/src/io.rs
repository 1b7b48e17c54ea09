//! JSON input formats, report serialisation and the canonical writer.
//!
//! Inputs are parsed by hand from `serde_json::Value` so error messages
//! can name the offending field. Reports are emitted through a custom
//! formatter that pins every float to `%.12e` and relies on the default
//! `BTreeMap` backing of `serde_json` objects for sorted keys, making
//! identical configurations produce byte-identical files.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use floq_core::bits::BitVec;
use floq_core::catalog::{self, CatalogEntry};
use floq_core::conjugacy::{check_reversible, ConjugatePair, Reversibility};
use floq_core::dense::{Complex64, DenseOperator};
use floq_core::floquet::FloquetSequence;
use floq_core::genu::{GeneralisedUnitarySpec, LogicalPart};
use floq_core::group::StabiliserGroup;
use floq_core::lattice::Lattice;
use floq_core::pauli::{PauliOperator, Sign};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use serde_json::{json, Map, Value};

/// Failures split by exit code: bad input or configuration (exit 2)
/// versus a check that ran and failed (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Check(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

pub fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub fn check_failure(msg: impl fmt::Display) -> CliError {
    CliError::Check(msg.to_string())
}

// ---------------------------------------------------------------------------
// Reading and extraction

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not valid JSON: {e}", path.display())))
}

fn expect_obj<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>, CliError> {
    v.as_object()
        .ok_or_else(|| usage(format!("{what} must be a JSON object")))
}

fn expect_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>, CliError> {
    v.as_array()
        .ok_or_else(|| usage(format!("{what} must be a JSON array")))
}

fn get<'v>(m: &'v Map<String, Value>, key: &str, what: &str) -> Result<&'v Value, CliError> {
    m.get(key)
        .ok_or_else(|| usage(format!("{what} is missing the \"{key}\" field")))
}

fn expect_str<'v>(v: &'v Value, what: &str) -> Result<&'v str, CliError> {
    v.as_str()
        .ok_or_else(|| usage(format!("{what} must be a string")))
}

pub fn expect_usize(v: &Value, what: &str) -> Result<usize, CliError> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| usage(format!("{what} must be a non-negative integer")))
}

pub fn expect_f64(v: &Value, what: &str) -> Result<f64, CliError> {
    v.as_f64()
        .ok_or_else(|| usage(format!("{what} must be a number")))
}

// ---------------------------------------------------------------------------
// Paulis and groups

/// A Pauli in any accepted form: a signed text string (`"-XZI"`), an
/// object `{"pauli":"XZI","sign":"-"}`, or the sparse form
/// `{"n":3,"terms":{"0":"X","1":"Z"},"sign":"-"}`.
pub fn parse_pauli(v: &Value, n: usize, what: &str) -> Result<PauliOperator, CliError> {
    let p = match v {
        Value::String(s) => PauliOperator::parse_observable(s)
            .map_err(|e| usage(format!("{what}: {e}")))?,
        Value::Object(m) => {
            if m.contains_key("terms") {
                parse_sparse_pauli(m, n, what)?
            } else {
                let letters = expect_str(get(m, "pauli", what)?, what)?;
                let sign = expect_str(get(m, "sign", what)?, what)?;
                if sign != "+" && sign != "-" {
                    return Err(usage(format!("{what}: sign must be \"+\" or \"-\"")));
                }
                PauliOperator::parse_observable(&format!("{sign}{letters}"))
                    .map_err(|e| usage(format!("{what}: {e}")))?
            }
        }
        _ => return Err(usage(format!("{what} must be a string or object"))),
    };
    if p.n() != n {
        return Err(usage(format!(
            "{what}: operator acts on {} qubits, expected {n}",
            p.n()
        )));
    }
    Ok(p)
}

fn parse_sparse_pauli(
    m: &Map<String, Value>,
    n: usize,
    what: &str,
) -> Result<PauliOperator, CliError> {
    let n_own = match m.get("n") {
        Some(v) => expect_usize(v, &format!("{what}.n"))?,
        None => n,
    };
    let mut p = PauliOperator::identity(n_own);
    let terms = expect_obj(get(m, "terms", what)?, &format!("{what}.terms"))?;
    for (site, letter) in terms {
        let q: usize = site
            .parse()
            .map_err(|_| usage(format!("{what}.terms: key \"{site}\" is not a qubit index")))?;
        let l = expect_str(letter, &format!("{what}.terms[{site}]"))?;
        let mut chars = l.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(usage(format!("{what}.terms[{site}] must be one letter")));
        };
        p.set_letter(q, c)
            .map_err(|e| usage(format!("{what}.terms: {e}")))?;
    }
    if let Some(s) = m.get("sign") {
        match expect_str(s, &format!("{what}.sign"))? {
            "+" => {}
            "-" => p = p.negated(),
            other => {
                return Err(usage(format!(
                    "{what}.sign must be \"+\" or \"-\", got \"{other}\""
                )))
            }
        }
    }
    Ok(p)
}

/// `{"n":4,"generators":[...]}` with generators in any Pauli form.
pub fn parse_group(v: &Value, what: &str) -> Result<StabiliserGroup, CliError> {
    let m = expect_obj(v, what)?;
    let n = expect_usize(get(m, "n", what)?, &format!("{what}.n"))?;
    let gens = expect_array(get(m, "generators", what)?, &format!("{what}.generators"))?;
    let mut parsed = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        parsed.push(parse_pauli(g, n, &format!("{what}.generators[{i}]"))?);
    }
    StabiliserGroup::new(n, parsed).map_err(|e| usage(format!("{what}: {e}")))
}

pub fn parse_lattice(v: &Value, what: &str) -> Result<Lattice, CliError> {
    let m = expect_obj(v, what)?;
    let dim = expect_usize(get(m, "dim", what)?, &format!("{what}.dim"))?;
    let rows = expect_array(get(m, "positions", what)?, &format!("{what}.positions"))?;
    let mut positions = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let label = format!("{what}.positions[{i}]");
        let coords = expect_array(row, &label)?;
        let mut pos = Vec::with_capacity(coords.len());
        for c in coords {
            pos.push(expect_f64(c, &label)?);
        }
        positions.push(pos);
    }
    let built = match m.get("period") {
        Some(p) => {
            let arr = expect_array(p, &format!("{what}.period"))?;
            let mut period = Vec::with_capacity(arr.len());
            for c in arr {
                period.push(expect_f64(c, &format!("{what}.period"))?);
            }
            Lattice::torus(dim, positions, period)
        }
        None => Lattice::euclidean(dim, positions),
    };
    built.map_err(|e| usage(format!("{what}: {e}")))
}

// ---------------------------------------------------------------------------
// Sequences and pairs

fn find_entry(name: &str) -> Result<CatalogEntry, CliError> {
    catalog::entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            let names: Vec<&str> = catalog::entries().iter().map(|e| e.name).collect();
            usage(format!(
                "unknown catalog entry \"{name}\"; available: {}",
                names.join(", ")
            ))
        })
}

/// A parsed sequence plus its geometry, kept separate so commands decide
/// whether attaching the lattice (which enforces the bound) is a check
/// or a precondition.
pub struct SequenceInput {
    pub seq: FloquetSequence,
    pub lattice: Option<Lattice>,
    pub bound: Option<f64>,
}

/// Either `{"catalog":NAME}` or `{"isgs":[...]}` with optional
/// `"transitions"` (explicit conjugate bases), `"lattice"` and `"bound"`.
pub fn parse_sequence(v: &Value) -> Result<SequenceInput, CliError> {
    let m = expect_obj(v, "sequence input")?;
    if let Some(c) = m.get("catalog") {
        let entry = find_entry(expect_str(c, "catalog")?)?;
        let seq = entry.build();
        let lattice = seq.lattice().cloned();
        let bound = seq.locality_bound();
        return Ok(SequenceInput { seq, lattice, bound });
    }
    let isgs_v = expect_array(get(m, "isgs", "sequence input")?, "isgs")?;
    let mut isgs = Vec::with_capacity(isgs_v.len());
    for (i, g) in isgs_v.iter().enumerate() {
        isgs.push(parse_group(g, &format!("isgs[{i}]"))?);
    }
    let seq = match m.get("transitions") {
        // Explicit bases: honour them exactly instead of re-deriving,
        // so hand-localised pairs survive an export/import cycle.
        Some(t) => {
            let trans = expect_array(t, "transitions")?;
            if trans.len() + 1 != isgs.len() {
                return Err(usage(format!(
                    "{} transitions do not fit {} groups",
                    trans.len(),
                    isgs.len()
                )));
            }
            let mut pairs = Vec::with_capacity(trans.len());
            for (t, w) in trans.iter().zip(isgs.windows(2)) {
                let label = format!("transitions[{}]", pairs.len());
                let tm = expect_obj(t, &label)?;
                let n = w[0].n();
                let basis_a = parse_pauli_list(get(tm, "basis_a", &label)?, n, &label)?;
                let basis_b = parse_pauli_list(get(tm, "basis_b", &label)?, n, &label)?;
                pairs.push(
                    ConjugatePair::from_parts(w[0].clone(), w[1].clone(), basis_a, basis_b)
                        .map_err(|e| check_failure(format!("{label}: {e}")))?,
                );
            }
            FloquetSequence::with_pairs(pairs)
        }
        None => FloquetSequence::from_isgs(isgs),
    }
    .map_err(|e| check_failure(format!("invalid sequence: {e}")))?;

    let lattice = match m.get("lattice") {
        Some(l) => Some(parse_lattice(l, "lattice")?),
        None => None,
    };
    let bound = match m.get("bound") {
        Some(b) => Some(expect_f64(b, "bound")?),
        None => None,
    };
    if lattice.is_some() != bound.is_some() {
        return Err(usage("\"lattice\" and \"bound\" must be given together"));
    }
    Ok(SequenceInput { seq, lattice, bound })
}

fn parse_pauli_list(v: &Value, n: usize, what: &str) -> Result<Vec<PauliOperator>, CliError> {
    let arr = expect_array(v, what)?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, p) in arr.iter().enumerate() {
        out.push(parse_pauli(p, n, &format!("{what}[{i}]"))?);
    }
    Ok(out)
}

/// A reversible pair from `{"catalog":NAME,"transition":T}` or
/// `{"group_a":...,"group_b":...}`. Irreversible groups are a check
/// failure, not a parse failure.
pub fn parse_pair_source(v: &Value, what: &str) -> Result<ConjugatePair, CliError> {
    let m = expect_obj(v, what)?;
    if let Some(c) = m.get("catalog") {
        let entry = find_entry(expect_str(c, &format!("{what}.catalog"))?)?;
        let seq = entry.build();
        let t = match m.get("transition") {
            Some(t) => expect_usize(t, &format!("{what}.transition"))?,
            None => 0,
        };
        return seq.pairs().get(t).cloned().ok_or_else(|| {
            usage(format!(
                "{} has {} transitions, index {t} is out of range",
                entry.name,
                seq.pairs().len()
            ))
        });
    }
    let a = parse_group(get(m, "group_a", what)?, &format!("{what}.group_a"))?;
    let b = parse_group(get(m, "group_b", what)?, &format!("{what}.group_b"))?;
    match check_reversible(&a, &b).map_err(|e| check_failure(format!("{what}: {e}")))? {
        Reversibility::Reversible(pair) => Ok(pair),
        Reversibility::NotReversible(w) => Err(check_failure(format!(
            "{what}: groups are not a reversible pair; {} commutes with the whole opposite quotient",
            w.element.to_text()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Generalised unitary inputs

pub enum UnitaryInput {
    Spec(GeneralisedUnitarySpec),
    Matrix(DenseOperator),
}

/// `{"pair_ref":...}` plus either `"terms"` (and optional
/// `"global_phase"`, `"logical"`) or an explicit `"matrix"`.
pub fn parse_genu_input(v: &Value) -> Result<(ConjugatePair, UnitaryInput), CliError> {
    let m = expect_obj(v, "input")?;
    let pair = parse_pair_source(get(m, "pair_ref", "input")?, "pair_ref")?;
    let n = pair.n();
    match (m.get("terms"), m.get("matrix")) {
        (Some(_), Some(_)) => Err(usage("give either \"terms\" or \"matrix\", not both")),
        (None, None) => Err(usage("input needs a \"terms\" list or a \"matrix\"")),
        (None, Some(mv)) => {
            let u = parse_matrix(mv, n, "matrix")?;
            Ok((pair, UnitaryInput::Matrix(u)))
        }
        (Some(tv), None) => {
            let n_m = pair.n_m();
            let arr = expect_array(tv, "terms")?;
            let mut terms = Vec::with_capacity(arr.len());
            for (i, t) in arr.iter().enumerate() {
                let label = format!("terms[{i}]");
                let tm = expect_obj(t, &label)?;
                let subset = parse_subset(get(tm, "subset", &label)?, n_m, &label)?;
                let phi = expect_f64(get(tm, "phi", &label)?, &format!("{label}.phi"))?;
                terms.push((subset, phi));
            }
            let global_phase = match m.get("global_phase") {
                Some(g) => expect_f64(g, "global_phase")?,
                None => 0.0,
            };
            let logical = match m.get("logical") {
                Some(l) => parse_logical(l, n)?,
                None => LogicalPart::Identity,
            };
            let spec = GeneralisedUnitarySpec::new(pair.clone(), terms, global_phase, logical)
                .map_err(|e| usage(format!("terms: {e}")))?;
            Ok((pair, UnitaryInput::Spec(spec)))
        }
    }
}

fn parse_subset(v: &Value, n_m: usize, what: &str) -> Result<BitVec, CliError> {
    let s = expect_str(v, &format!("{what}.subset"))?;
    if s.len() != n_m {
        return Err(usage(format!(
            "{what}.subset must have one bit per conjugate basis element ({n_m}), got {}",
            s.len()
        )));
    }
    let mut ones = Vec::new();
    for (i, c) in s.chars().enumerate() {
        match c {
            '1' => ones.push(i),
            '0' => {}
            _ => return Err(usage(format!("{what}.subset must contain only 0 and 1"))),
        }
    }
    Ok(BitVec::from_indices(n_m, &ones))
}

fn parse_logical(v: &Value, n: usize) -> Result<LogicalPart, CliError> {
    let m = expect_obj(v, "logical")?;
    match expect_str(get(m, "kind", "logical")?, "logical.kind")? {
        "identity" => Ok(LogicalPart::Identity),
        "matrix" => {
            let u = parse_matrix(get(m, "entries", "logical")?, n, "logical.entries")?;
            Ok(LogicalPart::Dense(u))
        }
        other => Err(usage(format!(
            "logical.kind \"{other}\" is not supported; use \"identity\" or \"matrix\""
        ))),
    }
}

/// Row-major complex matrix `[[[re,im],...],...]` of size `2^n`.
fn parse_matrix(v: &Value, n: usize, what: &str) -> Result<DenseOperator, CliError> {
    if n > floq_core::dense::MAX_MATRIX_QUBITS {
        return Err(usage(format!(
            "{what}: {n} qubits is beyond the dense limit of {}",
            floq_core::dense::MAX_MATRIX_QUBITS
        )));
    }
    let dim = 1usize << n;
    let rows = expect_array(v, what)?;
    if rows.len() != dim {
        return Err(usage(format!(
            "{what} must have {dim} rows, got {}",
            rows.len()
        )));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        let label = format!("{what}[{i}]");
        let cells = expect_array(row, &label)?;
        if cells.len() != dim {
            return Err(usage(format!(
                "{label} must have {dim} entries, got {}",
                cells.len()
            )));
        }
        for cell in cells {
            let pair = expect_array(cell, &label)?;
            if pair.len() != 2 {
                return Err(usage(format!("{label}: each entry is a [re, im] pair")));
            }
            entries.push(Complex64::new(
                expect_f64(&pair[0], &label)?,
                expect_f64(&pair[1], &label)?,
            ));
        }
    }
    DenseOperator::from_entries(n, entries).map_err(|e| usage(format!("{what}: {e}")))
}

/// Forced outcome stream: one `+` or `-` per measurement.
pub fn parse_forced(s: &str) -> Result<Vec<Sign>, CliError> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            other => Err(usage(format!(
                "forced outcomes must be a string of + and -, found '{other}'"
            ))),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Report building blocks

pub fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

pub fn pauli_json(p: &PauliOperator) -> Value {
    let text = p.to_text();
    let sign = if text.starts_with('-') { "-" } else { "+" };
    let letters: String = text.chars().filter(|c| c.is_ascii_uppercase()).collect();
    json!({ "pauli": letters, "sign": sign })
}

pub fn pauli_list_json(ps: &[PauliOperator]) -> Value {
    Value::Array(ps.iter().map(pauli_json).collect())
}

pub fn group_json(g: &StabiliserGroup) -> Value {
    json!({ "n": g.n(), "generators": pauli_list_json(g.generators()) })
}

pub fn lattice_json(l: &Lattice) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), json!(l.dim()));
    m.insert("positions".into(), json!(l.positions()));
    if let Some(p) = l.period() {
        m.insert("period".into(), json!(p));
    }
    Value::Object(m)
}

pub fn bitvec_string(v: &BitVec) -> String {
    (0..v.len()).map(|i| if v.get(i) { '1' } else { '0' }).collect()
}

pub fn mask_string(mask: u64, n_m: usize) -> String {
    (0..n_m)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

// ---------------------------------------------------------------------------
// Canonical output

/// Pretty printing with every float forced to `%.12e`; object keys are
/// already sorted because `serde_json` maps are backed by a `BTreeMap`.
struct CanonicalFormatter {
    inner: PrettyFormatter<'static>,
}

fn fmt_float(v: f64) -> String {
    let s = format!("{v:.12e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

impl Formatter for CanonicalFormatter {
    fn write_f64<W>(&mut self, w: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        w.write_all(fmt_float(value).as_bytes())
    }

    fn write_f32<W>(&mut self, w: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        w.write_all(fmt_float(value as f64).as_bytes())
    }

    fn begin_array<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array(w)
    }

    fn end_array<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array(w)
    }

    fn begin_array_value<W>(&mut self, w: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array_value(w)
    }

    fn begin_object<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object(w)
    }

    fn end_object<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object(w)
    }

    fn begin_object_key<W>(&mut self, w: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W>(&mut self, w: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object_value(w)
    }
}

pub fn render_canonical(v: &Value) -> String {
    let mut buf = Vec::new();
    let fmt = CanonicalFormatter {
        inner: PrettyFormatter::new(),
    };
    let mut ser = Serializer::with_formatter(&mut buf, fmt);
    v.serialize(&mut ser)
        .expect("in-memory serialisation cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serialised JSON is UTF-8")
}

/// Write the rendered report to the output file, or stdout if none.
pub fn emit(v: &Value, output: Option<&Path>) -> Result<(), CliError> {
    let text = render_canonical(v);
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("cannot write to stdout: {e}"))),
    }
}
