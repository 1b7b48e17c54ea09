//! Clifford conjugation on the symplectic representation, plus random
//! circuit and random reversible-pair generators for tests and fuzzing.
//!
//! Only the three standard generators are needed: conjugating a seed
//! pair of groups through a random word in {H, S, CNOT} reaches a broad
//! family of reversible pairs while preserving reversibility exactly.

use crate::conjugacy::{check_reversible, ConjugatePair, Reversibility};
use crate::group::StabiliserGroup;
use crate::pauli::{PauliOperator, Sign};
use alloc::vec::Vec;
use rand_core::RngCore;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    /// Controlled-X written (control, target).
    Cx(usize, usize),
}

impl Gate {
    /// Image of `p` under conjugation, `G p G^dagger`, with exact phase.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        let mut x = p.x_bits().clone();
        let mut z = p.z_bits().clone();
        let mut phase = p.phase();
        match *self {
            Gate::H(q) => {
                let (xq, zq) = (x.get(q), z.get(q));
                // X <-> Z, Y -> -Y
                if xq & zq {
                    phase = (phase + 2) % 4;
                }
                x.set(q, zq);
                z.set(q, xq);
            }
            Gate::S(q) => {
                let (xq, zq) = (x.get(q), z.get(q));
                // X -> Y, Y -> -X, Z -> Z
                if xq & zq {
                    phase = (phase + 2) % 4;
                }
                z.set(q, xq ^ zq);
            }
            Gate::Cx(c, t) => {
                let (xc, zc) = (x.get(c), z.get(c));
                let (xt, zt) = (x.get(t), z.get(t));
                if xc & zt & !(xt ^ zc) {
                    phase = (phase + 2) % 4;
                }
                x.set(t, xt ^ xc);
                z.set(c, zc ^ zt);
            }
        }
        PauliOperator::from_bits(x, z, phase).expect("bit lengths preserved")
    }
}

/// Conjugate through a whole circuit, first gate innermost:
/// `C p C^dagger` for `C = g_last ... g_first`.
pub fn conjugate_pauli(circuit: &[Gate], p: &PauliOperator) -> PauliOperator {
    let mut out = p.clone();
    for g in circuit {
        out = g.conjugate(&out);
    }
    out
}

/// Conjugate every generator; group validity is preserved exactly.
pub fn conjugate_group(circuit: &[Gate], group: &StabiliserGroup) -> StabiliserGroup {
    StabiliserGroup::trusted(
        group.n(),
        group
            .generators()
            .iter()
            .map(|g| conjugate_pauli(circuit, g))
            .collect(),
    )
}

pub(crate) fn uniform(rng: &mut impl RngCore, m: usize) -> usize {
    ((rng.next_u64() as u128 * m as u128) >> 64) as usize
}

/// Uniform random word in {H, S, CNOT} of the given length.
pub fn random_circuit(n: usize, len: usize, rng: &mut impl RngCore) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = if n > 1 { uniform(rng, 3) } else { uniform(rng, 2) };
        gates.push(match kind {
            0 => Gate::H(uniform(rng, n)),
            1 => Gate::S(uniform(rng, n)),
            _ => {
                let c = uniform(rng, n);
                let mut t = uniform(rng, n - 1);
                if t >= c {
                    t += 1;
                }
                Gate::Cx(c, t)
            }
        });
    }
    gates
}

/// Random reversible pair on `n` qubits with the given common rank and
/// `n_m` conjugate basis pairs, built by conjugating a canonical seed
/// pair through a random Clifford word. Generator signs are randomised
/// consistently across the two groups.
///
/// Requires `n_m <= rank <= n`.
pub fn random_reversible_pair(
    n: usize,
    rank: usize,
    n_m: usize,
    rng: &mut impl RngCore,
) -> ConjugatePair {
    assert!(n_m <= rank && rank <= n, "need n_m <= rank <= n");
    let sign_of = |bit: bool| if bit { Sign::Minus } else { Sign::Plus };
    // Shared part <Z_{n_m} .. Z_{rank-1}> with one sign choice used by
    // both groups, so the seed intersection carries no conflict.
    let single = |q: usize, letter: char| PauliOperator::single(n, q, letter).expect("in range");
    let shared: Vec<PauliOperator> = (n_m..rank)
        .map(|q| single(q, 'Z').with_sign(sign_of(rng.next_u64() & 1 == 1)))
        .collect();
    let mut gens_a: Vec<PauliOperator> = (0..n_m)
        .map(|q| single(q, 'Z').with_sign(sign_of(rng.next_u64() & 1 == 1)))
        .collect();
    let mut gens_b: Vec<PauliOperator> = (0..n_m)
        .map(|q| single(q, 'X').with_sign(sign_of(rng.next_u64() & 1 == 1)))
        .collect();
    gens_a.extend(shared.iter().cloned());
    gens_b.extend(shared.iter().cloned());
    let a = StabiliserGroup::trusted(n, gens_a);
    let b = StabiliserGroup::trusted(n, gens_b);

    let circuit = random_circuit(n, 20 * n.max(1), rng);
    let a = conjugate_group(&circuit, &a);
    let b = conjugate_group(&circuit, &b);
    match check_reversible(&a, &b).expect("conjugated seed pair stays well formed") {
        Reversibility::Reversible(pair) => pair,
        Reversibility::NotReversible(_) => {
            unreachable!("Clifford conjugation preserves reversibility")
        }
    }
}
