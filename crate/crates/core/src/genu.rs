//! Generalised logical unitaries: operators that need not preserve the
//! codespace but become valid logical operations once the next round of
//! conjugate-basis measurements is applied.
//!
//! The canonical form is `exp(i sum_e phi_e b^e) * U_A` with every `b^e`
//! a product over the rebased conjugate basis and `U_A` code-preserving.
//! Because each `b^e` squares to the identity, the term angles are only
//! defined up to a lattice of joint shifts; everything here is phrased
//! against one fixed gauge so decompositions are reproducible:
//! per-sector phases are lifted to `[0, 2*pi)` relative to the all-plus
//! outcome sector and solved by the Walsh transform.

use crate::bits::{BitMatrix, BitVec};
use crate::clifford::uniform;
use crate::conjugacy::ConjugatePair;
use crate::dense::{projector, DenseOperator, DenseState, MAX_MATRIX_QUBITS};
use crate::error::{Error, Result};
use crate::group::StabiliserGroup;
use crate::lattice::Lattice;
use crate::outcome::OutcomeSource;
use crate::pauli::{PauliOperator, Sign};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};

const TAU: f64 = 2.0 * core::f64::consts::PI;
/// Angles this close to a multiple of pi/2 count as transversal-Pauli.
pub const QUARTER_GRID_TOL: f64 = 1e-9;
/// Walsh coefficients below this are treated as absent terms.
const ANGLE_EPS: f64 = 1e-9;

#[inline]
fn reduce_angle(a: f64) -> f64 {
    let mut r = a % TAU;
    if r < 0.0 {
        r += TAU;
    }
    if r >= TAU {
        r -= TAU;
    }
    r
}

#[inline]
fn on_quarter_grid(angle: f64) -> bool {
    let q = core::f64::consts::FRAC_PI_2;
    let d = angle / q - libm::round(angle / q);
    f64::abs(d * q) < QUARTER_GRID_TOL
}

fn guard_dim(n: usize) -> Result<()> {
    if n > MAX_MATRIX_QUBITS {
        return Err(Error::TooLarge {
            n,
            max: MAX_MATRIX_QUBITS,
        });
    }
    Ok(())
}

/// One exponential term: a nonzero subset of the rebased conjugate
/// basis and its angle.
#[derive(Clone, Debug, PartialEq)]
pub struct BTerm {
    /// Indicator over `basis_b`; the term operator is the exact product
    /// of the selected basis elements.
    pub subset: BitVec,
    /// In `[0, 2*pi)`.
    pub angle: f64,
    /// Set when the angle sits on the `k*pi/2` grid, where the term
    /// exponential degenerates to a Pauli (odd `k`) or a sign (even).
    pub transversal: bool,
}

/// The code-preserving factor of a generalised unitary.
#[derive(Clone, Debug)]
pub enum LogicalPart {
    Identity,
    /// Explicit matrix; only its action on the source codespace is
    /// meaningful, the complement block is whatever makes it concrete.
    Dense(DenseOperator),
}

impl LogicalPart {
    pub fn materialise(&self, n: usize) -> Result<DenseOperator> {
        match self {
            LogicalPart::Identity => DenseOperator::identity(n),
            LogicalPart::Dense(m) => {
                if m.n() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: m.n(),
                    });
                }
                Ok(m.clone())
            }
        }
    }
}

/// A generalised unitary in product form: global phase, commuting
/// exponential terms over the conjugate basis, then a code-preserving
/// logical part.
#[derive(Clone, Debug)]
pub struct GeneralisedUnitarySpec {
    pair: ConjugatePair,
    b_terms: Vec<BTerm>,
    global_phase: f64,
    logical_part: LogicalPart,
}

impl GeneralisedUnitarySpec {
    /// Duplicate subsets are merged by adding their angles; zero
    /// subsets are rejected (an identity term is a global phase).
    pub fn new(
        pair: ConjugatePair,
        terms: Vec<(BitVec, f64)>,
        global_phase: f64,
        logical_part: LogicalPart,
    ) -> Result<Self> {
        let n_m = pair.n_m();
        let mut merged: Vec<(BitVec, f64)> = Vec::new();
        for (subset, angle) in terms {
            if subset.len() != n_m {
                return Err(Error::LengthMismatch {
                    expected: n_m,
                    got: subset.len(),
                });
            }
            if subset.is_zero() {
                return Err(Error::BadParameter(String::from(
                    "the empty subset is a global phase, not a term",
                )));
            }
            match merged.iter_mut().find(|(s, _)| *s == subset) {
                Some((_, a)) => *a += angle,
                None => merged.push((subset, angle)),
            }
        }
        let b_terms = merged
            .into_iter()
            .map(|(subset, angle)| {
                let angle = reduce_angle(angle);
                BTerm {
                    subset,
                    angle,
                    transversal: on_quarter_grid(angle),
                }
            })
            .collect();
        Ok(GeneralisedUnitarySpec {
            pair,
            b_terms,
            global_phase: reduce_angle(global_phase),
            logical_part,
        })
    }

    pub fn pair(&self) -> &ConjugatePair {
        &self.pair
    }

    pub fn b_terms(&self) -> &[BTerm] {
        &self.b_terms
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn logical_part(&self) -> &LogicalPart {
        &self.logical_part
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    fn subset_mask(term: &BTerm) -> u64 {
        let mut m = 0u64;
        for i in term.subset.iter_ones() {
            m |= 1 << i;
        }
        m
    }

    /// The exact product of the selected conjugate basis elements.
    pub fn term_operator(&self, index: usize) -> PauliOperator {
        self.pair.product_b(Self::subset_mask(&self.b_terms[index]))
    }

    /// Exact phase applied on the outcome sector `m`: every term acts
    /// there as `(-1)^{|e & m|}`.
    pub fn sector_phase(&self, m: u64) -> f64 {
        let mut phi = self.global_phase;
        for t in &self.b_terms {
            let parity = (Self::subset_mask(t) & m).count_ones() & 1;
            phi += if parity == 0 { t.angle } else { -t.angle };
        }
        phi
    }

    /// Gauge-fixed angles equivalent to this spec: sector phases are
    /// taken relative to the all-plus sector, reduced to `[0, 2*pi)`,
    /// and Walsh-transformed. Any two specs building the same operator
    /// agree here. Only the nonzero subsets are returned; the constant
    /// coefficient is the canonical global phase and is reported by
    /// the decomposition separately.
    pub fn canonical_angles(&self) -> Vec<(u64, f64)> {
        let n_m = self.pair.n_m();
        let count = 1u64 << n_m;
        let base = self.sector_phase(0);
        let lifted: Vec<f64> = (0..count)
            .map(|m| reduce_angle(self.sector_phase(m) - base))
            .collect();
        walsh_angles(&lifted)
    }
}

/// Solve `phi(m) = sum_e alpha_e (-1)^{|e & m|}` for the nonzero-`e`
/// coefficients and reduce them to `[0, 2*pi)`, dropping negligible
/// ones. Input length must be a power of two.
fn walsh_angles(phi: &[f64]) -> Vec<(u64, f64)> {
    let count = phi.len() as u64;
    debug_assert!(count.is_power_of_two());
    let mut out = Vec::new();
    for e in 1..count {
        let mut acc = 0.0;
        for (m, p) in phi.iter().enumerate() {
            let parity = (e & m as u64).count_ones() & 1;
            acc += if parity == 0 { *p } else { -*p };
        }
        let alpha = reduce_angle(acc / count as f64);
        if alpha > ANGLE_EPS && TAU - alpha > ANGLE_EPS {
            out.push((e, alpha));
        }
    }
    out
}

/// Materialise `e^{i gamma} * prod_t exp(i phi_t b^{e_t}) * U_A`.
pub fn build_exponential(spec: &GeneralisedUnitarySpec) -> Result<DenseOperator> {
    let n = spec.n();
    guard_dim(n)?;
    let mut u = spec.logical_part.materialise(n)?;
    let gamma = spec.global_phase;
    u.scale(Complex64::new(libm::cos(gamma), libm::sin(gamma)));
    for (i, term) in spec.b_terms.iter().enumerate() {
        let op = spec.term_operator(i);
        debug_assert!(op.is_hermitian(), "commuting products stay Hermitian");
        let e = DenseOperator::exp_i_theta_pauli(&op, term.angle)?;
        u = e.mul(&u)?;
    }
    Ok(u)
}

/// Residuals for the four defining conditions of a generalised logical
/// unitary, swept over every outcome sector.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub tol: f64,
    pub n_m: usize,
    /// Condition 1: the image stays inside the detector space.
    pub detectability_residual: f64,
    /// Condition 2: each source-side quotient generator acts as a phase
    /// on every outcome sector of the image.
    pub preservation_residual: f64,
    /// Condition 3: each sector block is an isometry times `2^{-n_m/2}`.
    pub isometry_residual: f64,
    /// Condition 4: codespace-compressed blocks are proportional across
    /// sectors with unimodular ratios.
    pub equivalence_residual: f64,
    /// Largest deviation of any extracted ratio or phase factor from
    /// the unit circle.
    pub unimodularity_residual: f64,
    /// Largest deviation of a sector probability from `2^{-n_m}` over
    /// sampled codespace states.
    pub probability_residual: f64,
    /// `alpha[m][i]`: phase of quotient generator `i` on sector `m`.
    pub alpha: Vec<Vec<f64>>,
    /// Relative sector phase table, gauge-fixed to zero at `m = 0`.
    pub phi: Vec<f64>,
}

impl ConditionReport {
    pub fn conditions(&self) -> [bool; 4] {
        [
            self.detectability_residual <= self.tol,
            self.preservation_residual <= self.tol,
            self.isometry_residual <= self.tol,
            self.equivalence_residual <= self.tol && self.unimodularity_residual <= self.tol,
        ]
    }

    pub fn pass(&self) -> bool {
        self.conditions() == [true; 4] && self.probability_residual <= self.tol
    }
}

struct SectorBlocks {
    /// `Pi_b(m) U Pi_A` for every sector.
    measured: Vec<DenseOperator>,
    /// `Pi_A Pi_b(m) U Pi_A` for every sector.
    compressed: Vec<DenseOperator>,
    u_pa: DenseOperator,
    pa: DenseOperator,
}

fn sector_blocks(pair: &ConjugatePair, u: &DenseOperator) -> Result<SectorBlocks> {
    let pa = projector(pair.group_a(), 0)?;
    let u_pa = u.mul(&pa)?;
    let count = 1u64 << pair.n_m();
    let mut measured = Vec::with_capacity(count as usize);
    let mut compressed = Vec::with_capacity(count as usize);
    for m in 0..count {
        let mut block = u_pa.clone();
        for (i, b) in pair.basis_b().iter().enumerate() {
            block.project_factor_left(b, Sign::from_bit((m >> i) & 1 == 1));
        }
        let mut comp = block.clone();
        for g in pair.group_a().generators() {
            comp.project_factor_left(g, Sign::Plus);
        }
        measured.push(block);
        compressed.push(comp);
    }
    Ok(SectorBlocks {
        measured,
        compressed,
        u_pa,
        pa,
    })
}

/// Best proportionality scalar and its residual: `c` minimising
/// `|| a - c * b ||_F`, residual reported in the spectral norm.
fn proportionality(a: &DenseOperator, b: &DenseOperator) -> Result<(Complex64, f64)> {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for row in 0..a.dim() {
        for col in 0..a.dim() {
            let bb = b.at(row, col);
            num += bb.conj() * a.at(row, col);
            den += bb.norm_sqr();
        }
    }
    if den < 1e-300 {
        // A vanishing reference makes the relation `a = c * b` hold
        // only if `a` vanishes too; report its full size.
        return Ok((Complex64::new(1.0, 0.0), a.spectral_norm()));
    }
    let c = num / den;
    let diff = a.add_scaled(b, -c)?;
    Ok((c, diff.spectral_norm()))
}

/// Check the four conditions for `u` against `pair`, sweeping every
/// outcome sector. `u` must be unitary to `tol` on the full space.
pub fn check_conditions(
    pair: &ConjugatePair,
    u: &DenseOperator,
    tol: f64,
) -> Result<ConditionReport> {
    let n = pair.n();
    guard_dim(n)?;
    if u.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: u.n(),
        });
    }
    let id = DenseOperator::identity(n)?;
    let unitarity = u
        .adjoint()
        .mul(u)?
        .add_scaled(&id, Complex64::new(-1.0, 0.0))?
        .spectral_norm();
    if unitarity > tol.max(1e-12) {
        return Err(Error::BadParameter(format!(
            "operator is not unitary: residual {unitarity:.3e}"
        )));
    }

    let n_m = pair.n_m();
    let count = 1u64 << n_m;
    let blocks = sector_blocks(pair, u)?;

    let p_sub = projector(pair.intersection(), 0)?;
    let detectability_residual = p_sub
        .mul(&blocks.u_pa)?
        .add_scaled(&blocks.u_pa, Complex64::new(-1.0, 0.0))?
        .spectral_norm();

    let factor = libm::exp2(-(n_m as f64));
    let mut preservation_residual: f64 = 0.0;
    let mut isometry_residual: f64 = 0.0;
    let mut equivalence_residual: f64 = 0.0;
    let mut unimodularity_residual: f64 = 0.0;
    let mut alpha = Vec::with_capacity(count as usize);
    let mut phi = Vec::with_capacity(count as usize);

    for m in 0..count {
        let block = &blocks.measured[m as usize];

        let mut alpha_row = Vec::with_capacity(pair.basis_a().len());
        for a in pair.basis_a() {
            let mut moved = blocks.u_pa.clone();
            moved.apply_pauli_left(a);
            for (i, b) in pair.basis_b().iter().enumerate() {
                moved.project_factor_left(b, Sign::from_bit((m >> i) & 1 == 1));
            }
            let (c, resid) = proportionality(&moved, block)?;
            preservation_residual = preservation_residual.max(resid);
            unimodularity_residual = unimodularity_residual.max(f64::abs(c.norm() - 1.0));
            alpha_row.push(c.arg());
        }
        alpha.push(alpha_row);

        let gram = block.adjoint().mul(block)?;
        let resid3 = gram
            .add_scaled(&blocks.pa, Complex64::new(-factor, 0.0))?
            .spectral_norm();
        isometry_residual = isometry_residual.max(resid3);

        let (ratio, resid4) =
            proportionality(&blocks.compressed[m as usize], &blocks.compressed[0])?;
        equivalence_residual = equivalence_residual.max(resid4);
        unimodularity_residual = unimodularity_residual.max(f64::abs(ratio.norm() - 1.0));
        phi.push(ratio.arg());
    }

    // Independent attestation that outcome statistics are uniform.
    let mut probability_residual: f64 = 0.0;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x67656e75);
    for _ in 0..3 {
        let psi = DenseState::random_codespace(pair.group_a(), &mut rng)?;
        for m in 0..count {
            let v = blocks.measured[m as usize].apply(&psi)?;
            let p = v.norm() * v.norm();
            probability_residual = probability_residual.max(f64::abs(p - factor));
        }
    }

    Ok(ConditionReport {
        tol,
        n_m,
        detectability_residual,
        preservation_residual,
        isometry_residual,
        equivalence_residual,
        unimodularity_residual,
        probability_residual,
        alpha,
        phi,
    })
}

/// Extract the gauge-fixed product form from a passing operator: the
/// logical part is read off the all-plus sector, per-sector phases are
/// lifted to `[0, 2*pi)` relative to it, and the term angles come out
/// of the Walsh transform. Fails with the phase table if the rebuilt
/// operator does not match on the codespace.
pub fn decompose_canonical(
    pair: &ConjugatePair,
    u: &DenseOperator,
    tol: f64,
) -> Result<GeneralisedUnitarySpec> {
    let report = check_conditions(pair, u, tol)?;
    if !report.pass() {
        let c = report.conditions();
        return Err(Error::BadParameter(format!(
            "generalised-unitary conditions fail (pass flags {:?}, probability residual {:.3e})",
            c, report.probability_residual
        )));
    }

    let n_m = pair.n_m();
    let count = 1u64 << n_m;
    let blocks = sector_blocks(pair, u)?;
    let mut u_a = blocks.compressed[0].clone();
    u_a.scale(Complex64::new(libm::exp2(n_m as f64), 0.0));

    let u_a_dag = u_a.adjoint();
    let mut lifted = Vec::with_capacity(count as usize);
    for m in 0..count {
        let t = u_a_dag.mul(&blocks.compressed[m as usize])?.trace();
        lifted.push(reduce_angle(t.arg()));
    }
    debug_assert!(lifted[0] < 1e-9 || TAU - lifted[0] < 1e-9);
    lifted[0] = 0.0;

    let terms: Vec<(BitVec, f64)> = walsh_angles(&lifted)
        .into_iter()
        .map(|(e, angle)| {
            let mut subset = BitVec::zeros(n_m);
            for i in 0..n_m {
                if (e >> i) & 1 == 1 {
                    subset.set(i, true);
                }
            }
            (subset, angle)
        })
        .collect();
    // Sector 0 carries total phase zero by the gauge, so the constant
    // Walsh coefficient compensates the sum of the term angles there.
    let global: f64 = lifted.iter().sum::<f64>() / count as f64;

    let spec = GeneralisedUnitarySpec::new(
        pair.clone(),
        terms,
        global,
        LogicalPart::Dense(u_a),
    )?;

    let rebuilt = build_exponential(&spec)?;
    let residual = rebuilt
        .add_scaled(&blocks.u_pa, Complex64::new(-1.0, 0.0))?
        .spectral_norm();
    if residual > tol {
        return Err(Error::Reconstruction {
            residual,
            phases: lifted.iter().enumerate().map(|(m, p)| (m as u64, *p)).collect(),
        });
    }
    Ok(spec)
}

/// Draw a random spec on `pair`: distinct nonzero subsets with angles
/// kept away from the `k*pi/2` grid, a random global phase, and a
/// logical part made of quarter-turn exponentials of logical
/// representatives (a logical Clifford).
pub fn random_spec(
    pair: &ConjugatePair,
    max_terms: usize,
    rng: &mut impl RngCore,
) -> Result<GeneralisedUnitarySpec> {
    let n_m = pair.n_m();
    guard_dim(pair.n())?;
    if n_m == 0 || n_m > 16 {
        return Err(Error::BadParameter(format!(
            "need 1..=16 measured directions, got {n_m}"
        )));
    }
    let pool = (1u64 << n_m) - 1;
    let want = 1 + uniform(rng, max_terms.min(pool as usize));
    let mut masks: Vec<u64> = Vec::new();
    while masks.len() < want {
        let e = 1 + uniform(rng, pool as usize) as u64;
        if !masks.contains(&e) {
            masks.push(e);
        }
    }
    let mut angle = || loop {
        let a = rng.next_u64() as f64 / (u64::MAX as f64) * TAU;
        let q = core::f64::consts::FRAC_PI_2;
        let d = f64::abs((a / q - libm::round(a / q)) * q);
        if d > 1e-3 {
            return a;
        }
    };
    let terms: Vec<(BitVec, f64)> = masks
        .into_iter()
        .map(|e| {
            let mut subset = BitVec::zeros(n_m);
            for i in 0..n_m {
                if (e >> i) & 1 == 1 {
                    subset.set(i, true);
                }
            }
            (subset, angle())
        })
        .collect();
    let global = rng.next_u64() as f64 / (u64::MAX as f64) * TAU;

    let flat = pair.group_a().normaliser_logicals().flat();
    let logical_part = if flat.is_empty() {
        LogicalPart::Identity
    } else {
        let mut u = DenseOperator::identity(pair.n())?;
        let factors = uniform(rng, 4);
        for _ in 0..factors {
            let mut l = PauliOperator::identity(pair.n());
            loop {
                let mask = uniform(rng, (1 << flat.len()) - 1) + 1;
                for (i, q) in flat.iter().enumerate() {
                    if (mask >> i) & 1 == 1 {
                        l = l.mul(q);
                    }
                }
                break;
            }
            let l = l.unsigned();
            u = DenseOperator::exp_i_theta_pauli(&l, core::f64::consts::FRAC_PI_4)?.mul(&u)?;
        }
        if factors == 0 {
            LogicalPart::Identity
        } else {
            LogicalPart::Dense(u)
        }
    };
    GeneralisedUnitarySpec::new(pair.clone(), terms, global, logical_part)
}

/// Indices of terms whose operator anticommutes with `q`.
fn anticommuting_terms(spec: &GeneralisedUnitarySpec, q: &PauliOperator) -> Vec<usize> {
    (0..spec.b_terms.len())
        .filter(|i| spec.term_operator(*i).sympl(q) == 1)
        .collect()
}

/// The term sets entering the closed form must be independent as
/// subsets of the conjugate basis, otherwise products of several terms
/// can collapse to the identity and contribute extra real corrections.
fn require_independent(spec: &GeneralisedUnitarySpec, idx: &[usize]) -> Result<()> {
    let n_m = spec.pair.n_m();
    let rows: Vec<BitVec> = idx
        .iter()
        .map(|i| spec.b_terms[*i].subset.clone())
        .collect();
    let len = rows.len();
    if BitMatrix::from_rows(n_m, rows).rank() != len {
        return Err(Error::BadParameter(String::from(
            "anticommuting term subsets are linearly dependent; the closed form does not apply",
        )));
    }
    Ok(())
}

/// Connected correlation of two stabilisers after evolving by the
/// spec's exponential, in closed form: with `f = cos(2*angle)` over the
/// anticommuting term sets,
/// `C = |prod f over K(a a')| * |1 - prod f^2 over K(a) and K(a')|`.
pub fn correlation_closed_form(
    spec: &GeneralisedUnitarySpec,
    a: &PauliOperator,
    a_prime: &PauliOperator,
) -> Result<f64> {
    for p in [a, a_prime] {
        if !spec.pair.group_a().contains_unsigned(p) {
            return Err(Error::NotInQuotient(format!(
                "{} is not a stabiliser of the source group",
                p.to_text()
            )));
        }
    }
    let product = a.mul(a_prime);
    let k_a = anticommuting_terms(spec, a);
    let k_ap = anticommuting_terms(spec, a_prime);
    let k_prod = anticommuting_terms(spec, &product);
    debug_assert_eq!(
        k_prod,
        k_a.iter()
            .chain(&k_ap)
            .filter(|i| k_a.contains(i) != k_ap.contains(i))
            .copied()
            .collect::<alloc::collections::BTreeSet<_>>()
            .into_iter()
            .collect::<Vec<_>>()
    );
    require_independent(spec, &k_a)?;
    require_independent(spec, &k_ap)?;
    require_independent(spec, &k_prod)?;

    let mut outer = 1.0;
    for i in &k_prod {
        outer *= libm::cos(2.0 * spec.b_terms[*i].angle);
    }
    let mut shared = 1.0;
    for i in &k_a {
        if k_ap.contains(i) {
            let f = libm::cos(2.0 * spec.b_terms[*i].angle);
            shared *= f * f;
        }
    }
    Ok(f64::abs(outer) * f64::abs(1.0 - shared))
}

/// Connected correlation evaluated directly: the state is evolved by
/// the exponential factor alone (the logical part acts within the
/// codespace and is excluded by convention) and the correlator is
/// computed densely.
pub fn correlation_dense(
    spec: &GeneralisedUnitarySpec,
    a: &PauliOperator,
    a_prime: &PauliOperator,
    state: &DenseState,
) -> Result<f64> {
    if state.n() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: state.n(),
        });
    }
    let residual = state.codespace_residual(spec.pair.group_a());
    if residual > 1e-8 {
        return Err(Error::OutsideCodespace { residual });
    }
    for p in [a, a_prime] {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_text()));
        }
    }
    let mut amps = state.amplitudes().to_vec();
    for (i, term) in spec.b_terms.iter().enumerate() {
        let op = spec.term_operator(i);
        let moved = DenseState::from_amplitudes(spec.n(), amps.clone())?.apply_pauli(&op)?;
        let c = Complex64::new(libm::cos(term.angle), 0.0);
        let s = Complex64::new(0.0, libm::sin(term.angle));
        for (acc, m) in amps.iter_mut().zip(moved.amplitudes()) {
            *acc = c * *acc + s * m;
        }
    }
    let evolved = DenseState::from_amplitudes(spec.n(), amps)?;
    let ea = evolved.expectation(a)?;
    let eap = evolved.expectation(a_prime)?;
    let eprod = evolved.expectation(&a.mul(a_prime))?;
    Ok((eprod - ea * eap).norm())
}

/// Outcome of a zero-correlation audit.
#[derive(Clone, Debug)]
pub enum ZeroCorrelationStatus {
    /// All sampled codespace states stayed below the bound.
    Verified { max_connected: f64, states: usize },
    /// A hypothesis of the statement failed; nothing was asserted.
    Skipped { reason: String },
}

#[derive(Clone, Debug)]
pub struct ZeroCorrelationReport {
    pub status: ZeroCorrelationStatus,
    pub tol: f64,
}

impl ZeroCorrelationReport {
    pub fn pass(&self) -> bool {
        matches!(
            self.status,
            ZeroCorrelationStatus::Verified { max_connected, .. } if max_connected <= self.tol
        )
    }

    pub fn skipped(&self) -> bool {
        matches!(self.status, ZeroCorrelationStatus::Skipped { .. })
    }
}

/// Qubits on which the operator acts nontrivially, read directly off
/// the matrix block structure.
pub fn operator_support(m: &DenseOperator) -> Vec<usize> {
    let dim = m.dim();
    let mut support = Vec::new();
    'qubit: for q in 0..m.n() {
        let bit = 1usize << q;
        for row in 0..dim {
            for col in 0..dim {
                if row & bit == 0 && col & bit == 0 {
                    if (m.at(row, col) - m.at(row | bit, col | bit)).norm() > 1e-12 {
                        support.push(q);
                        continue 'qubit;
                    }
                } else if (row & bit == 0) != (col & bit == 0)
                    && m.at(row, col).norm() > 1e-12
                {
                    support.push(q);
                    continue 'qubit;
                }
            }
        }
    }
    support
}

/// Paulis supported on `region` that commute with every generator,
/// returned as a kernel basis (phase 0 representatives).
fn region_commutant_basis(group: &StabiliserGroup, region: &[usize]) -> Vec<PauliOperator> {
    let n = group.n();
    let w = region.len();
    let mut rows = Vec::with_capacity(group.rank());
    for g in group.generators() {
        // Unknown layout: [x on region | z on region]; commutation with
        // g reads z-bits of g against x-unknowns and vice versa.
        let mut row = BitVec::zeros(2 * w);
        for (j, q) in region.iter().enumerate() {
            row.set(j, g.z_bits().get(*q));
            row.set(w + j, g.x_bits().get(*q));
        }
        rows.push(row);
    }
    BitMatrix::from_rows(2 * w, rows)
        .kernel()
        .into_iter()
        .filter(|v| !v.is_zero())
        .map(|v| {
            let mut x = BitVec::zeros(n);
            let mut z = BitVec::zeros(n);
            for (j, q) in region.iter().enumerate() {
                x.set(*q, v.get(j));
                z.set(*q, v.get(w + j));
            }
            PauliOperator::from_bits(x, z, 0).expect("lengths match")
        })
        .collect()
}

/// Restriction of a Pauli to a region (phase dropped).
fn restrict(p: &PauliOperator, region: &[usize]) -> PauliOperator {
    let n = p.n();
    let mut x = BitVec::zeros(n);
    let mut z = BitVec::zeros(n);
    for q in region {
        x.set(*q, p.x_bits().get(*q));
        z.set(*q, p.z_bits().get(*q));
    }
    PauliOperator::from_bits(x, z, 0).expect("lengths match")
}

/// Audit that two far-apart small observables have zero connected
/// correlation on every codespace state. The distance hypotheses are
/// checked operationally: no logical representative may fit inside
/// either region, and no group element may couple the two regions
/// without both halves being group elements themselves. Hypothesis
/// failures produce a skipped report, not a pass.
#[allow(clippy::too_many_arguments)]
pub fn zero_correlation_stabiliser_check(
    group: &StabiliserGroup,
    a_obs: &DenseOperator,
    region_a: &[usize],
    b_obs: &DenseOperator,
    region_b: &[usize],
    separation: Option<(&Lattice, f64)>,
    states: usize,
    seed: u64,
    tol: f64,
) -> Result<ZeroCorrelationReport> {
    let n = group.n();
    guard_dim(n)?;
    for obs in [a_obs, b_obs] {
        if obs.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: obs.n(),
            });
        }
    }
    for q in region_a.iter().chain(region_b) {
        if *q >= n {
            return Err(Error::BadParameter(format!("qubit {q} out of range")));
        }
    }
    if region_a.iter().any(|q| region_b.contains(q)) {
        return Err(Error::RegionOverlap);
    }
    for (obs, region, name) in [(a_obs, region_a, "A"), (b_obs, region_b, "B")] {
        let support = operator_support(obs);
        if support.iter().any(|q| !region.contains(q)) {
            return Err(Error::BadParameter(format!(
                "observable {name} acts outside its declared region"
            )));
        }
    }

    let skip = |reason: String| {
        Ok(ZeroCorrelationReport {
            status: ZeroCorrelationStatus::Skipped { reason },
            tol,
        })
    };

    if let Some((lattice, bound)) = separation {
        let mut min_dist = f64::INFINITY;
        for qa in region_a {
            for qb in region_b {
                min_dist = min_dist.min(lattice.distance(*qa, *qb));
            }
        }
        if min_dist <= bound {
            return skip(format!(
                "regions are only {min_dist} apart, within the locality bound {bound}"
            ));
        }
    }

    for (region, name) in [(region_a, "A"), (region_b, "B")] {
        for p in region_commutant_basis(group, region) {
            if !group.contains_unsigned(&p) {
                return skip(format!(
                    "logical representative {} fits inside region {name}; its support does not bound the code distance",
                    p.to_text()
                ));
            }
        }
    }

    let canonical = group.canonicalise();
    let union: Vec<usize> = region_a.iter().chain(region_b).copied().collect();
    let mut outside_rows = Vec::new();
    for q in 0..n {
        if union.contains(&q) {
            continue;
        }
        let mut xr = BitVec::zeros(canonical.rank());
        let mut zr = BitVec::zeros(canonical.rank());
        for (i, g) in canonical.generators().iter().enumerate() {
            xr.set(i, g.x_bits().get(q));
            zr.set(i, g.z_bits().get(q));
        }
        outside_rows.push(xr);
        outside_rows.push(zr);
    }
    for combo in BitMatrix::from_rows(canonical.rank(), outside_rows).kernel() {
        if combo.is_zero() {
            continue;
        }
        let mut mask = 0u64;
        for i in combo.iter_ones() {
            mask |= 1 << i;
        }
        let element = canonical.subset_product(mask);
        let part_a = restrict(&element, region_a);
        if !group.contains_unsigned(&part_a)
            || !group.contains_unsigned(&restrict(&element, region_b))
        {
            return skip(format!(
                "stabiliser element {} couples the two regions; they are not far apart for this group",
                element.to_text()
            ));
        }
    }

    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut max_connected: f64 = 0.0;
    for _ in 0..states {
        let psi = DenseState::random_codespace(group, &mut rng)?;
        let b_psi = b_obs.apply(&psi)?;
        let a_psi = a_obs.apply(&psi)?;
        let eab = psi.inner(&a_obs.apply(&b_psi)?);
        let ea = psi.inner(&a_psi);
        let eb = psi.inner(&b_psi);
        max_connected = max_connected.max((eab - ea * eb).norm());
    }
    Ok(ZeroCorrelationReport {
        status: ZeroCorrelationStatus::Verified {
            max_connected,
            states,
        },
        tol,
    })
}

/// Convenience: the post-measurement logical comparison used by tests.
/// Applies `u`, measures the conjugate basis with the supplied
/// outcomes, and returns the resulting normalised state.
pub fn apply_and_measure(
    pair: &ConjugatePair,
    u: &DenseOperator,
    state: &DenseState,
    source: &mut OutcomeSource,
) -> Result<(DenseState, u64)> {
    let mut psi = u.apply(state)?;
    let mut mask = 0u64;
    for (i, b) in pair.basis_b().iter().enumerate() {
        // Mirror projective measurement: draw the outcome, project,
        // renormalise.
        let sign = source.next_sign()?;
        if sign == Sign::Minus {
            mask |= 1 << i;
        }
        psi.project_factor(b, sign);
    }
    psi.normalise()?;
    Ok((psi, mask))
}
