//! Bundled example codes and measurement sequences.
//!
//! Three instances cover the interesting regimes: a one-qubit toy with no
//! logical content, a two-qubit pair with one spectator logical qubit, and
//! a honeycomb-code torus whose checks are two-body and geometrically
//! local. Tests and the command-line tools pull their fixtures from here.

use crate::bits::BitMatrix;
use crate::conjugacy::ConjugatePair;
use crate::error::{Error, Result};
use crate::floquet::FloquetSequence;
use crate::group::StabiliserGroup;
use crate::lattice::Lattice;
use crate::outcome::OutcomeSource;
use crate::pauli::{PauliOperator, Sign};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Named builder for one bundled sequence.
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> FloquetSequence,
}

impl CatalogEntry {
    pub fn build(&self) -> FloquetSequence {
        (self.build)()
    }
}

/// Every bundled sequence, smallest first.
pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "single_qubit_zx",
            summary: "one qubit, Z and X measured in alternation, no logicals",
            build: single_qubit_zx,
        },
        CatalogEntry {
            name: "two_qubit_logical",
            summary: "measured qubit plus one untouched logical qubit",
            build: two_qubit_logical,
        },
        CatalogEntry {
            name: "honeycomb_2x2",
            summary: "smallest honeycomb torus, 12 qubits, two-body checks",
            build: || honeycomb(2, 2).unwrap(),
        },
    ]
}

fn generated(n: usize, gens: Vec<PauliOperator>) -> StabiliserGroup {
    StabiliserGroup::new(n, gens).unwrap()
}

/// Minimal reversible cycle: measure Z, then X, then Z again.
///
/// One qubit, no logical space; every measurement outcome is a fresh
/// coin flip.
pub fn single_qubit_zx() -> FloquetSequence {
    let z = generated(1, vec![PauliOperator::single(1, 0, 'Z').unwrap()]);
    let x = generated(1, vec![PauliOperator::single(1, 0, 'X').unwrap()]);
    FloquetSequence::from_isgs(vec![z.clone(), x, z]).unwrap()
}

/// The same Z/X cycle on qubit 0 with qubit 1 left alone, so the pair
/// carries exactly one logical qubit.
pub fn two_qubit_logical() -> FloquetSequence {
    let z = generated(2, vec![PauliOperator::single(2, 0, 'Z').unwrap()]);
    let x = generated(2, vec![PauliOperator::single(2, 0, 'X').unwrap()]);
    FloquetSequence::from_isgs(vec![z.clone(), x, z]).unwrap()
}

/// Edge of the brick-wall honeycomb: two endpoint sites plus the colour
/// that fixes both its measurement round and its Pauli letter.
struct Edge {
    u: usize,
    v: usize,
    color: usize,
}

const ROUND_LETTERS: [char; 3] = ['X', 'Y', 'Z'];

/// Honeycomb code on a torus, in brick-wall coordinates.
///
/// Qubits sit on an `(3*lx) x ly` grid; every horizontal neighbour pair
/// is an edge and column `x` carries a vertical edge in row `y` exactly
/// when `x + y` is even, which makes every site degree three. The edge
/// starting at column `x` gets colour `x+1 mod 3` (horizontal) or
/// `x+2 mod 3` (vertical); faces are 2x1 bricks whose six boundary edges
/// alternate between the two colours other than the brick's own
/// `x mod 3`. Round `r` measures the two-body checks
/// `letter(c) (x) letter(c)` on all edges of colour `c = r mod 3`.
///
/// Group signs are produced by actually running the measurement schedule
/// from the all-zeros product state with every outcome forced to +1,
/// until the signed group repeats with period three. The three steady
/// rounds become the returned sequence. Conjugate bases are chosen
/// per brick: inside each brick of the colour not being measured, two
/// vertex-sharing (old, new) check pairs on opposite sides of the
/// hexagon, which are biorthogonal by construction and have support
/// diameter 1.
pub fn honeycomb(lx: usize, ly: usize) -> Result<FloquetSequence> {
    if lx < 2 || ly < 2 || lx % 2 != 0 || ly % 2 != 0 {
        return Err(Error::BadParameter(format!(
            "honeycomb torus needs even dimensions of at least 2, got {lx} by {ly}"
        )));
    }
    let (w, h) = (3 * lx, ly);
    let n = w * h;
    let site = |x: usize, y: usize| (y % h) * w + (x % w);
    let check = |u: usize, v: usize, color: usize| -> PauliOperator {
        let letter = ROUND_LETTERS[color];
        PauliOperator::single(n, u, letter)
            .unwrap()
            .mul(&PauliOperator::single(n, v, letter).unwrap())
    };

    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            edges.push(Edge {
                u: site(x, y),
                v: site(x + 1, y),
                color: (x + 1) % 3,
            });
            if (x + y) % 2 == 0 {
                edges.push(Edge {
                    u: site(x, y),
                    v: site(x, y + 1),
                    color: (x + 2) % 3,
                });
            }
        }
    }

    // Brick faces: bottom-left corner (x, y), x + y even. The brick of
    // colour c acts as letter(c) on all six corners once its boundary
    // checks are multiplied out.
    let bricks: Vec<(usize, usize)> = (0..h)
        .flat_map(|y| (0..w).filter(move |x| (x + y) % 2 == 0).map(move |x| (x, y)))
        .collect();
    let plaquette = |x: usize, y: usize| -> PauliOperator {
        let letter = ROUND_LETTERS[x % 3];
        let mut p = PauliOperator::identity(n);
        for (dx, dy) in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)] {
            p = p.mul(&PauliOperator::single(n, site(x + dx, y + dy), letter).unwrap());
        }
        p
    };

    // Bootstrap: measure rounds with all outcomes forced to +1 starting
    // from |0..0>. Deterministic outcomes never consume a forced sign,
    // and nothing here can pin a product to -1, so the forcing is
    // consistent. The simulated state also carries the logical content,
    // which the measurement period is free to permute, so periodicity is
    // detected on the extracted check-and-plaquette part alone.
    let mut state = generated(
        n,
        (0..n)
            .map(|q| PauliOperator::single(n, q, 'Z').unwrap())
            .collect(),
    );
    let isg_of = |state: &StabiliserGroup, color: usize| -> Option<StabiliserGroup> {
        // Plaquettes carry one relation per colour class, so thin the
        // list to an independent subset as it is gathered. Signs agree
        // automatically: all candidates are elements of one state group.
        let mut gens: Vec<PauliOperator> = Vec::new();
        let mut span = BitMatrix::new(2 * n);
        let mut keep = |p: PauliOperator, state: &StabiliserGroup| -> Option<()> {
            let sign = state.contains(&p)?;
            let mut grown = span.clone();
            grown.push(p.sympl_row());
            if grown.rank() > gens.len() {
                span = grown;
                gens.push(p.with_sign(sign));
            }
            Some(())
        };
        for &(x, y) in &bricks {
            keep(plaquette(x, y), state)?;
        }
        for e in edges.iter().filter(|e| e.color == color) {
            keep(check(e.u, e.v, color), state)?;
        }
        Some(StabiliserGroup::new(n, gens).ok()?.canonicalise())
    };
    let max_rounds = 36;
    let mut source = OutcomeSource::forced(vec![Sign::Plus; max_rounds * n]);
    let mut history: Vec<Option<StabiliserGroup>> = Vec::new();
    let mut steady_end = None;
    for round in 0..max_rounds {
        let color = round % 3;
        for e in edges.iter().filter(|e| e.color == color) {
            state = state.measure(&check(e.u, e.v, color), &mut source)?.group;
        }
        history.push(isg_of(&state, color));
        if round >= 3 {
            if let (Some(now), Some(then)) = (&history[round], &history[round - 3]) {
                if now.generators() == then.generators() {
                    steady_end = Some(round);
                    break;
                }
            }
        }
    }
    let Some(end) = steady_end else {
        return Err(Error::InvalidGroup(String::from(
            "honeycomb bootstrap did not settle into a period-3 cycle",
        )));
    };
    let isgs: Vec<StabiliserGroup> = history[end - 3..=end]
        .iter()
        .map(|g| g.clone().expect("steady rounds have full plaquette data"))
        .collect();

    let signed_member = |g: &StabiliserGroup, p: PauliOperator| -> Result<PauliOperator> {
        match g.contains(&p) {
            Some(Sign::Plus) => Ok(p),
            Some(Sign::Minus) => Ok(p.negated()),
            None => Err(Error::InvalidGroup(format!(
                "check {} missing from its round group",
                p.to_text()
            ))),
        }
    };

    let mut pairs = Vec::with_capacity(3);
    for j in 0..3 {
        let prev_color = (end + j) % 3; // isgs[j] followed a round of this colour
        let next_color = (prev_color + 1) % 3;
        let spectator = 3 - prev_color - next_color;
        let mut basis_a = Vec::new();
        let mut basis_b = Vec::new();
        // Bricks of the spectator colour: bottom-left corner (x, y) with
        // x + y even and x = spectator mod 3. Their boundary alternates
        // between prev_color and next_color.
        for y in 0..h {
            for x in (0..w).filter(|x| (x + y) % 2 == 0 && x % 3 == spectator) {
                let verts = [
                    site(x, y),
                    site(x + 1, y),
                    site(x + 2, y),
                    site(x + 2, y + 1),
                    site(x + 1, y + 1),
                    site(x, y + 1),
                ];
                let ring_color = |i: usize| if i % 2 == 0 { (x + 1) % 3 } else { (x + 2) % 3 };
                let ring = |i: usize| check(verts[i], verts[(i + 1) % 6], ring_color(i));
                let k = if ring_color(0) == prev_color { 0 } else { 1 };
                // Two (old, new) pairs on opposite sides of the hexagon:
                // each pair shares one vertex, everything else is
                // disjoint, so the commutation matrix is the identity.
                for (ai, bi) in [(k, k + 1), (k + 4, k + 3)] {
                    basis_a.push(signed_member(&isgs[j], ring(ai % 6))?);
                    basis_b.push(signed_member(&isgs[j + 1], ring(bi % 6))?);
                }
            }
        }
        pairs.push(ConjugatePair::from_parts(
            isgs[j].clone(),
            isgs[j + 1].clone(),
            basis_a,
            basis_b,
        )?);
    }

    let positions = (0..n)
        .map(|q| vec![(q % w) as f64, (q / w) as f64])
        .collect();
    let lattice = Lattice::torus(2, positions, vec![w as f64, h as f64])?;
    // Every conjugate basis element is a single edge check, so the
    // tightest honest locality bound is one lattice spacing.
    FloquetSequence::with_pairs(pairs)?.with_lattice(lattice, 1.0)
}
