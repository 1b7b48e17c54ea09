//! Dense statevector and operator oracle.
//!
//! Everything here is brute force on purpose: states are full 2^n
//! amplitude vectors, operators are full 2^n x 2^n matrices, and Pauli
//! actions are applied index by index. The module certifies the
//! algebraic identities the symplectic layer relies on, so it avoids
//! sharing any clever machinery with it.
//!
//! Size guards: matrices refuse n > 12, state-only operations refuse
//! n > 20. Residual norms on explicit matrices use the spectral norm
//! estimated by power iteration (Frobenius fallback on
//! non-convergence); sweeps too large to materialise use matrix-free
//! power iteration on the residual map itself.

use crate::conjugacy::ConjugatePair;
use crate::error::{Error, Result};
use crate::group::StabiliserGroup;
use crate::pauli::{PauliOperator, Sign};
use alloc::vec;
use alloc::vec::Vec;
pub use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_core::RngCore;

pub const MAX_MATRIX_QUBITS: usize = 12;
pub const MAX_STATE_QUBITS: usize = 20;

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Single-word masks and base coefficient of a Pauli: `P|j> =
/// base * (-1)^{popcount(z & j)} |j ^ x>`.
fn pauli_masks(p: &PauliOperator) -> (u64, u64, Complex64) {
    let x = p.x_bits().words().first().copied().unwrap_or(0);
    let z = p.z_bits().words().first().copied().unwrap_or(0);
    let y_count = (x & z).count_ones() as u8;
    let base = I_POW[((p.phase() + y_count) % 4) as usize];
    (x, z, base)
}

#[inline]
fn parity_sign(bits: u64) -> f64 {
    if bits.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn guard(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::TooLarge { n, max });
    }
    Ok(())
}

fn unit_from_rng(rng: &mut impl RngCore) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) / ((1u64 << 53) as f64 + 1.0)
}

fn gaussian(rng: &mut impl RngCore) -> (f64, f64) {
    let u1 = unit_from_rng(rng);
    let u2 = unit_from_rng(rng);
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let t = 2.0 * core::f64::consts::PI * u2;
    (r * libm::cos(t), r * libm::sin(t))
}

// ---------------------------------------------------------------------------
// States

#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        guard(n, MAX_STATE_QUBITS)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::BadParameter(alloc::format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        guard(n, MAX_STATE_QUBITS)?;
        if amps.len() != 1usize << n {
            return Err(Error::LengthMismatch {
                expected: 1usize << n,
                got: amps.len(),
            });
        }
        Ok(DenseState { n, amps })
    }

    /// Haar-ish random state: i.i.d. complex Gaussian amplitudes,
    /// normalised.
    pub fn random(n: usize, rng: &mut impl RngCore) -> Result<Self> {
        guard(n, MAX_STATE_QUBITS)?;
        let dim = 1usize << n;
        let mut amps = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (re, im) = gaussian(rng);
            amps.push(Complex64::new(re, im));
        }
        let mut s = DenseState { n, amps };
        s.normalise()?;
        Ok(s)
    }

    /// Random state in the joint +1 eigenspace of the group's signed
    /// generators.
    pub fn random_codespace(group: &StabiliserGroup, rng: &mut impl RngCore) -> Result<Self> {
        for _ in 0..32 {
            let mut s = Self::random(group.n(), rng)?;
            s.project_group(group, 0);
            if s.norm() > 1e-6 {
                s.normalise()?;
                return Ok(s);
            }
        }
        Err(Error::BadParameter(alloc::string::String::from(
            "projection annihilated 32 random states in a row",
        )))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn normalise(&mut self) -> Result<()> {
        let nrm = self.norm();
        if nrm < 1e-300 {
            return Err(Error::BadParameter(alloc::string::String::from(
                "cannot normalise a zero state",
            )));
        }
        let inv = 1.0 / nrm;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_pauli(&self, p: &PauliOperator) -> Result<DenseState> {
        if p.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: p.n(),
            });
        }
        let (x, z, base) = pauli_masks(p);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, amp) in self.amps.iter().enumerate() {
            out[j ^ x as usize] = base * parity_sign(z & j as u64) * amp;
        }
        Ok(DenseState { n: self.n, amps: out })
    }

    /// `<self| P |self>`.
    pub fn expectation(&self, p: &PauliOperator) -> Result<Complex64> {
        let applied = self.apply_pauli(p)?;
        Ok(self.inner(&applied))
    }

    /// In-place `|psi> <- (|psi> + sign * P |psi>) / 2`.
    pub fn project_factor(&mut self, p: &PauliOperator, sign: Sign) {
        let (x, z, base) = pauli_masks(p);
        let c = base * sign.as_f64();
        let xm = x as usize;
        if xm == 0 {
            for (j, amp) in self.amps.iter_mut().enumerate() {
                let s = c * parity_sign(z & j as u64);
                *amp = (*amp + s * *amp) * 0.5;
            }
            return;
        }
        for j in 0..self.amps.len() {
            let k = j ^ xm;
            if k < j {
                continue;
            }
            let (aj, ak) = (self.amps[j], self.amps[k]);
            // P|k> lands on |j> and vice versa.
            self.amps[j] = (aj + c * parity_sign(z & k as u64) * ak) * 0.5;
            self.amps[k] = (ak + c * parity_sign(z & j as u64) * aj) * 0.5;
        }
    }

    /// Project onto the joint eigenspace of the group's generators with
    /// outcome bits from `mask` (bit i set means eigenvalue -1 for
    /// generator i).
    pub fn project_group(&mut self, group: &StabiliserGroup, mask: u64) {
        for (i, g) in group.generators().iter().enumerate() {
            self.project_factor(g, Sign::from_bit((mask >> i) & 1 == 1));
        }
    }

    /// Project onto eigenspaces of an arbitrary commuting family.
    pub fn project_basis(&mut self, basis: &[PauliOperator], mask: u64) {
        for (i, p) in basis.iter().enumerate() {
            self.project_factor(p, Sign::from_bit((mask >> i) & 1 == 1));
        }
    }

    /// `|| Pi_G |psi> - |psi> ||` with all-plus outcomes.
    pub fn codespace_residual(&self, group: &StabiliserGroup) -> f64 {
        let mut proj = self.clone();
        proj.project_group(group, 0);
        diff_norm(&proj.amps, &self.amps)
    }

    /// `min_phi || self - e^{i phi} other ||` for unit vectors.
    pub fn distance_up_to_phase(&self, other: &DenseState) -> f64 {
        let overlap = self.inner(other).norm();
        libm::sqrt((2.0 - 2.0 * overlap).max(0.0))
    }
}

fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    libm::sqrt(
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum(),
    )
}

// ---------------------------------------------------------------------------
// Operators

#[derive(Clone, Debug)]
pub struct DenseOperator {
    n: usize,
    dim: usize,
    /// Row-major `dim * dim` entries.
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn identity(n: usize) -> Result<Self> {
        guard(n, MAX_MATRIX_QUBITS)?;
        let dim = 1usize << n;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(DenseOperator { n, dim, entries })
    }

    pub fn from_pauli(p: &PauliOperator) -> Result<Self> {
        let mut m = Self::identity(p.n())?;
        m.apply_pauli_left(p);
        Ok(m)
    }

    /// Arbitrary matrix from row-major entries. No structure (unitarity,
    /// hermiticity) is assumed; checks that need one test it themselves.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        guard(n, MAX_MATRIX_QUBITS)?;
        let dim = 1usize << n;
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(DenseOperator { n, dim, entries })
    }

    /// `exp(i theta P) = cos(theta) I + i sin(theta) P` for Hermitian P.
    pub fn exp_i_theta_pauli(p: &PauliOperator, theta: f64) -> Result<Self> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_text()));
        }
        let mut pm = Self::from_pauli(p)?;
        let id = Self::identity(p.n())?;
        let c = Complex64::new(libm::cos(theta), 0.0);
        let s = Complex64::new(0.0, libm::sin(theta));
        for (e, i) in pm.entries.iter_mut().zip(&id.entries) {
            *e = c * i + s * *e;
        }
        Ok(pm)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// `M <- P M` in place, O(dim^2).
    pub fn apply_pauli_left(&mut self, p: &PauliOperator) {
        let (x, z, base) = pauli_masks(p);
        let xm = x as usize;
        if xm == 0 {
            for j in 0..self.dim {
                let c = base * parity_sign(z & j as u64);
                for e in &mut self.entries[j * self.dim..(j + 1) * self.dim] {
                    *e *= c;
                }
            }
            return;
        }
        for j in 0..self.dim {
            let k = j ^ xm;
            if k < j {
                continue;
            }
            let cj = base * parity_sign(z & j as u64); // coefficient on |j> -> |k>
            let ck = base * parity_sign(z & k as u64); // coefficient on |k> -> |j>
            for col in 0..self.dim {
                let (ej, ek) = (self.entries[j * self.dim + col], self.entries[k * self.dim + col]);
                self.entries[j * self.dim + col] = ck * ek;
                self.entries[k * self.dim + col] = cj * ej;
            }
        }
    }

    /// `M <- (M + sign P M) / 2` in place, O(dim^2).
    pub fn project_factor_left(&mut self, p: &PauliOperator, sign: Sign) {
        let (x, z, base) = pauli_masks(p);
        let c = base * sign.as_f64();
        let xm = x as usize;
        if xm == 0 {
            for j in 0..self.dim {
                let s = c * parity_sign(z & j as u64);
                let f = (Complex64::new(1.0, 0.0) + s) * 0.5;
                for e in &mut self.entries[j * self.dim..(j + 1) * self.dim] {
                    *e *= f;
                }
            }
            return;
        }
        for j in 0..self.dim {
            let k = j ^ xm;
            if k < j {
                continue;
            }
            let cj = c * parity_sign(z & j as u64);
            let ck = c * parity_sign(z & k as u64);
            for col in 0..self.dim {
                let (ej, ek) = (self.entries[j * self.dim + col], self.entries[k * self.dim + col]);
                self.entries[j * self.dim + col] = (ej + ck * ek) * 0.5;
                self.entries[k * self.dim + col] = (ek + cj * ej) * 0.5;
            }
        }
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.entries[i * dim + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &other.entries[k * dim..(k + 1) * dim];
                let out = &mut entries[i * dim..(i + 1) * dim];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseOperator {
            n: self.n,
            dim,
            entries,
        })
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &DenseOperator, c: Complex64) -> Result<DenseOperator> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(DenseOperator {
            n: self.n,
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&mut self, c: Complex64) {
        for e in &mut self.entries {
            *e *= c;
        }
    }

    pub fn adjoint(&self) -> DenseOperator {
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[j * dim + i] = self.entries[i * dim + j].conj();
            }
        }
        DenseOperator {
            n: self.n,
            dim,
            entries,
        }
    }

    pub fn apply(&self, state: &DenseState) -> Result<DenseState> {
        if state.dim() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: state.dim(),
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim];
        for (i, out) in amps.iter_mut().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            *out = row.iter().zip(&state.amps).map(|(m, a)| m * a).sum();
        }
        Ok(DenseState {
            n: state.n,
            amps,
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|e| e.norm_sqr()).sum())
    }

    /// Largest singular value by power iteration on `M^dagger M`;
    /// falls back to the Frobenius norm (an upper bound) if the
    /// iteration has not settled.
    pub fn spectral_norm(&self) -> f64 {
        let frob = self.frobenius_norm();
        if frob < 1e-300 {
            return 0.0;
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5bec7a61);
        let mut best = 0.0f64;
        for _ in 0..2 {
            let mut v: Vec<Complex64> = (0..self.dim)
                .map(|_| {
                    let (re, im) = gaussian(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            normalise_vec(&mut v);
            let mut last = 0.0f64;
            let mut converged = false;
            for _ in 0..80 {
                let w = self.apply_raw(&v);
                let sigma = vec_norm(&w);
                let mut u = self.apply_raw_adjoint(&w);
                let un = vec_norm(&u);
                if un < 1e-300 {
                    last = sigma;
                    converged = true;
                    break;
                }
                for e in &mut u {
                    *e /= un;
                }
                v = u;
                if (sigma - last).abs() <= 1e-12 * sigma.max(1.0) {
                    last = sigma;
                    converged = true;
                    break;
                }
                last = sigma;
            }
            if !converged {
                return frob;
            }
            best = best.max(last);
        }
        best
    }

    fn apply_raw(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            *o = row.iter().zip(v).map(|(m, a)| m * a).sum();
        }
        out
    }

    fn apply_raw_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let vi = v[i];
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            for (o, m) in out.iter_mut().zip(row) {
                *o += m.conj() * vi;
            }
        }
        out
    }

    /// `|| self - other ||` in the spectral norm.
    pub fn distance(&self, other: &DenseOperator) -> Result<f64> {
        Ok(self
            .add_scaled(other, Complex64::new(-1.0, 0.0))?
            .spectral_norm())
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    libm::sqrt(v.iter().map(|e| e.norm_sqr()).sum())
}

fn normalise_vec(v: &mut [Complex64]) {
    let n = vec_norm(v);
    if n > 1e-300 {
        for e in v.iter_mut() {
            *e /= n;
        }
    }
}

// ---------------------------------------------------------------------------
// Projectors and transition operators

/// `prod_i (I + (-1)^{m_i} g_i) / 2` over the group's generators.
pub fn projector(group: &StabiliserGroup, mask: u64) -> Result<DenseOperator> {
    let mut m = DenseOperator::identity(group.n())?;
    for (i, g) in group.generators().iter().enumerate() {
        m.project_factor_left(g, Sign::from_bit((mask >> i) & 1 == 1));
    }
    Ok(m)
}

/// Projector over an arbitrary commuting Hermitian family.
pub fn basis_projector(n: usize, basis: &[PauliOperator], mask: u64) -> Result<DenseOperator> {
    let mut m = DenseOperator::identity(n)?;
    for (i, p) in basis.iter().enumerate() {
        m.project_factor_left(p, Sign::from_bit((mask >> i) & 1 == 1));
    }
    Ok(m)
}

/// `2^{n_m/2} Pi_{B(m)} Pi_A`: the isometry implemented by measuring
/// the `b` basis with outcomes `mask`, as a full-space matrix
/// annihilating the complement of the source codespace.
pub fn transition_k(pair: &ConjugatePair, mask: u64) -> Result<DenseOperator> {
    let mut m = projector(pair.group_a(), 0)?;
    for (i, b) in pair.basis_b().iter().enumerate() {
        m.project_factor_left(b, Sign::from_bit((mask >> i) & 1 == 1));
    }
    m.scale(Complex64::new(libm::pow(2.0, pair.n_m() as f64 / 2.0), 0.0));
    Ok(m)
}

/// The reverse transition `2^{n_m/2} Pi_A Pi_{B(m)}`; adjoint of
/// `transition_k` and its inverse on the codespace.
pub fn transition_k_reverse(pair: &ConjugatePair, mask: u64) -> Result<DenseOperator> {
    Ok(transition_k(pair, mask)?.adjoint())
}

/// `V = prod_i (a_i + b_i) / sqrt(2)`: a full-space unitary agreeing
/// with the mask-0 transition on the codespace.
pub fn transition_v(pair: &ConjugatePair) -> Result<DenseOperator> {
    let mut m = DenseOperator::identity(pair.n())?;
    let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    for (a, b) in pair.basis_a().iter().zip(pair.basis_b()) {
        let mut ma = m.clone();
        ma.apply_pauli_left(a);
        m.apply_pauli_left(b);
        m = ma.add_scaled(&m, Complex64::new(1.0, 0.0))?;
        m.scale(s);
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Identity reports

#[derive(Clone, Debug)]
pub struct PairIdentityReport {
    pub n_m: usize,
    /// Number of (outcome, outcome) combinations swept.
    pub combos: usize,
    pub max_residual_b_side: f64,
    pub max_residual_a_side: f64,
    pub tol: f64,
}

impl PairIdentityReport {
    pub fn pass(&self) -> bool {
        self.max_residual_b_side <= self.tol && self.max_residual_a_side <= self.tol
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual_b_side.max(self.max_residual_a_side)
    }
}

/// Check `Pi_b(m_b) Pi_a(m_a) Pi_b(m_b) = 2^{-n_m} Pi_b(m_b)` and the
/// a-side analogue over every pair of outcome vectors.
///
/// Up to 8 qubits the residual is materialised and measured in the
/// spectral norm. Beyond that the same residual is measured matrix-free:
/// power iteration on `v -> R v`, which only ever touches states.
pub fn verify_pair_identities(pair: &ConjugatePair, tol: f64) -> Result<PairIdentityReport> {
    guard(pair.n(), MAX_MATRIX_QUBITS)?;
    let n_m = pair.n_m();
    let sweep = 1u64 << n_m;
    let mut report = PairIdentityReport {
        n_m,
        combos: (sweep * sweep) as usize,
        max_residual_b_side: 0.0,
        max_residual_a_side: 0.0,
        tol,
    };
    let factor = libm::pow(2.0, -(n_m as f64));
    let explicit = pair.n() <= 8;
    for m_outer in 0..sweep {
        for m_inner in 0..sweep {
            for b_side in [true, false] {
                let (outer, inner): (&[PauliOperator], &[PauliOperator]) = if b_side {
                    (pair.basis_b(), pair.basis_a())
                } else {
                    (pair.basis_a(), pair.basis_b())
                };
                let residual = if explicit {
                    let po = basis_projector(pair.n(), outer, m_outer)?;
                    let pi = basis_projector(pair.n(), inner, m_inner)?;
                    let mut lhs = po.mul(&pi)?.mul(&po)?;
                    lhs = lhs.add_scaled(&po, Complex64::new(-factor, 0.0))?;
                    lhs.spectral_norm()
                } else {
                    residual_norm_matrix_free(
                        pair.n(),
                        outer,
                        m_outer,
                        inner,
                        m_inner,
                        factor,
                    )
                };
                if b_side {
                    report.max_residual_b_side = report.max_residual_b_side.max(residual);
                } else {
                    report.max_residual_a_side = report.max_residual_a_side.max(residual);
                }
            }
        }
    }
    Ok(report)
}

/// Spectral norm of `Pi_o(m_o) Pi_i(m_i) Pi_o(m_o) - factor Pi_o(m_o)`
/// by power iteration; the residual is Hermitian so the iteration acts
/// on it directly.
fn residual_norm_matrix_free(
    n: usize,
    outer: &[PauliOperator],
    m_outer: u64,
    inner: &[PauliOperator],
    m_inner: u64,
    factor: f64,
) -> f64 {
    let apply = |v: &DenseState| -> DenseState {
        let mut u = v.clone();
        u.project_basis(outer, m_outer);
        let mut w = u.clone();
        w.project_basis(inner, m_inner);
        w.project_basis(outer, m_outer);
        let amps = w
            .amplitudes()
            .iter()
            .zip(u.amplitudes())
            .map(|(a, b)| a - factor * b)
            .collect();
        DenseState::from_amplitudes(n, amps).expect("dimensions preserved")
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let mut best = 0.0f64;
    for _ in 0..2 {
        let mut v = DenseState::random(n, &mut rng).expect("guarded size");
        let mut last = 0.0f64;
        for _ in 0..40 {
            let w = apply(&v);
            let lambda = w.norm();
            if lambda < 1e-300 {
                last = 0.0;
                break;
            }
            let inv = 1.0 / lambda;
            let amps = w.amplitudes().iter().map(|a| a * inv).collect();
            v = DenseState::from_amplitudes(n, amps).expect("dimensions preserved");
            if (lambda - last).abs() <= 1e-13 * lambda.max(1.0) {
                last = lambda;
                break;
            }
            last = lambda;
        }
        best = best.max(last);
    }
    best
}

#[derive(Clone, Debug)]
pub struct UniformOutcomeReport {
    pub n_m: usize,
    pub expected: f64,
    pub max_deviation: f64,
    pub tol: f64,
}

impl UniformOutcomeReport {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tol
    }
}

/// Every outcome vector of the `b`-basis measurement must occur with
/// probability exactly `2^{-n_m}` on a codespace state.
pub fn uniform_probability_check(
    pair: &ConjugatePair,
    state: &DenseState,
    tol: f64,
) -> Result<UniformOutcomeReport> {
    if state.n() != pair.n() {
        return Err(Error::LengthMismatch {
            expected: pair.n(),
            got: state.n(),
        });
    }
    let residual = state.codespace_residual(pair.group_a());
    if residual > tol.max(1e-8) {
        return Err(Error::OutsideCodespace { residual });
    }
    let n_m = pair.n_m();
    let expected = libm::pow(2.0, -(n_m as f64));
    let mut max_dev = 0.0f64;
    for mask in 0..(1u64 << n_m) {
        let mut projected = state.clone();
        projected.project_basis(pair.basis_b(), mask);
        let p = projected.norm();
        max_dev = max_dev.max((p * p - expected).abs());
    }
    Ok(UniformOutcomeReport {
        n_m,
        expected,
        max_deviation: max_dev,
        tol,
    })
}

#[derive(Clone, Debug)]
pub struct LogicalExpectationReport {
    pub before: f64,
    pub max_deviation: f64,
    pub tol: f64,
}

impl LogicalExpectationReport {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tol
    }
}

/// Rewrite a normaliser element of `group_a` so it commutes with every
/// measured `b_i`, using exact products of the pair's `a` basis. The
/// rewritten operator acts identically on the codespace.
pub fn rewrite_through_pair(pair: &ConjugatePair, q: &PauliOperator) -> PauliOperator {
    let mut s = 0u64;
    for (i, b) in pair.basis_b().iter().enumerate() {
        if q.sympl(b) == 1 {
            s |= 1 << i;
        }
    }
    pair.product_a(s).mul(q)
}

/// `<Q>` before the transition equals `<Q'>` after it, for every
/// outcome, where `Q'` is the rewritten representative.
pub fn logical_expectation_check(
    pair: &ConjugatePair,
    state: &DenseState,
    q: &PauliOperator,
    tol: f64,
) -> Result<LogicalExpectationReport> {
    if !q.is_hermitian() {
        return Err(Error::NotHermitian(q.to_text()));
    }
    if pair
        .group_a()
        .generators()
        .iter()
        .any(|g| q.sympl(g) == 1)
    {
        return Err(Error::NotLogical(q.to_text()));
    }
    let residual = state.codespace_residual(pair.group_a());
    if residual > tol.max(1e-8) {
        return Err(Error::OutsideCodespace { residual });
    }
    let before_c = state.expectation(q)?;
    let before = before_c.re;
    let rewritten = rewrite_through_pair(pair, q);
    let mut max_dev = 0.0f64;
    for mask in 0..(1u64 << pair.n_m()) {
        let mut post = state.clone();
        post.project_basis(pair.basis_b(), mask);
        let norm = post.norm();
        if norm < 1e-12 {
            continue;
        }
        post.normalise()?;
        let after = post.expectation(&rewritten)?.re;
        max_dev = max_dev.max((after - before).abs());
    }
    Ok(LogicalExpectationReport {
        before,
        max_deviation: max_dev,
        tol,
    })
}
