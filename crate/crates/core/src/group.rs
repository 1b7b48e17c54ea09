//! Abelian stabiliser groups with exact sign tracking.
//!
//! A group is stored as an independent list of Hermitian, pairwise
//! commuting generators. Canonicalisation runs GF(2) row reduction over
//! the `[x | z]` rows while multiplying the actual operators, so signs are
//! never guessed: a dependency that closes onto `-I` is detected exactly.

use crate::bits::{BitMatrix, BitVec};
use crate::error::{Error, Result};
use crate::outcome::OutcomeSource;
use crate::pauli::{PauliOperator, Sign};
use alloc::format;
use alloc::vec::Vec;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StabiliserGroup {
    n: usize,
    generators: Vec<PauliOperator>,
}

/// How a measurement interacted with the group.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MeasureKind {
    /// Anticommuted with the group: outcome random, group updated.
    Projected,
    /// Measured operator was (up to sign) in the group: outcome fixed.
    Deterministic,
    /// Commutes with everything but is not a member: outcome random,
    /// group unchanged. The post-measurement state is not described by
    /// this group alone, so callers must treat the flag seriously.
    Uncoupled,
}

#[derive(Clone, Debug)]
pub struct Measurement {
    pub group: StabiliserGroup,
    pub outcome: Sign,
    pub kind: MeasureKind,
}

/// Symplectic logical basis: pairs `(X_i, Z_i)` commuting with the group,
/// with `X_i` anticommuting with `Z_j` exactly when `i == j`.
#[derive(Clone, Debug)]
pub struct LogicalBasis {
    pub pairs: Vec<(PauliOperator, PauliOperator)>,
}

impl LogicalBasis {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    /// Flattened `[X_1 .. X_k, Z_1 .. Z_k]` view used for symplectic
    /// matrices of logical actions.
    pub fn flat(&self) -> Vec<PauliOperator> {
        let mut v: Vec<PauliOperator> = self.pairs.iter().map(|(x, _)| x.clone()).collect();
        v.extend(self.pairs.iter().map(|(_, z)| z.clone()));
        v
    }
}

impl StabiliserGroup {
    /// Validating constructor: Hermitian, pairwise commuting, independent
    /// generators whose products never reach `-I`.
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        for g in &generators {
            if g.n() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: g.n(),
                });
            }
            if !g.is_hermitian() {
                return Err(Error::NotHermitian(g.to_text()));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in generators.iter().skip(i + 1) {
                if !a.commutes(b) {
                    return Err(Error::InvalidGroup(format!(
                        "generators {} and {} anticommute",
                        a.to_text(),
                        b.to_text()
                    )));
                }
            }
        }
        let group = StabiliserGroup { n, generators };
        // Reduction surfaces dependencies; a signed dependency is -I.
        let _ = group.echelon()?;
        Ok(group)
    }

    /// Internal constructor for generator lists already known valid.
    pub(crate) fn trusted(n: usize, generators: Vec<PauliOperator>) -> Self {
        StabiliserGroup { n, generators }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Number of logical qubits `n - rank`.
    pub fn k(&self) -> usize {
        self.n - self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    /// Row-reduce the generators with exact sign propagation.
    ///
    /// Column order is the x block then the z block. An elimination that
    /// empties a row means the input was dependent; if the emptied row
    /// carries a minus sign the group would contain `-I`.
    fn echelon(&self) -> Result<Vec<PauliOperator>> {
        let mut rows = self.generators.clone();
        let cols = 2 * self.n;
        let mut next = 0usize;
        for col in 0..cols {
            let Some(src) = (next..rows.len()).find(|&r| rows[r].sympl_row().get(col)) else {
                continue;
            };
            rows.swap(next, src);
            let pivot = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.sympl_row().get(col) {
                    *row = row.mul(&pivot);
                }
            }
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        for row in rows.iter().skip(next) {
            debug_assert!(row.is_identity_bits());
            return Err(match row.sign() {
                Ok(Sign::Minus) => Error::InvalidGroup(alloc::string::String::from(
                    "generating set multiplies to -I",
                )),
                _ => Error::InvalidGroup(alloc::string::String::from(
                    "generators are dependent",
                )),
            });
        }
        Ok(rows)
    }

    /// Unique canonical form: reduced echelon generators in pivot order.
    pub fn canonicalise(&self) -> StabiliserGroup {
        let rows = self.echelon().expect("group validated at construction");
        StabiliserGroup {
            n: self.n,
            generators: rows,
        }
    }

    /// Unsigned canonical rows; equal iff the groups have the same span
    /// ignoring signs.
    pub fn unsigned_canonical(&self) -> Vec<BitVec> {
        self.canonicalise()
            .generators
            .iter()
            .map(|g| g.sympl_row())
            .collect()
    }

    pub fn same_unsigned_span(&self, other: &StabiliserGroup) -> bool {
        self.n == other.n && self.unsigned_canonical() == other.unsigned_canonical()
    }

    /// The `[x | z]` generator matrix.
    pub fn sympl_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(
            2 * self.n,
            self.generators.iter().map(|g| g.sympl_row()).collect(),
        )
    }

    /// Membership with sign report: `Some(s)` means `s * p` is a group
    /// member. `Some(Minus)` for `p` therefore says the group stabilises
    /// the opposite sign.
    pub fn contains(&self, p: &PauliOperator) -> Option<Sign> {
        if p.n() != self.n || !p.is_hermitian() {
            return None;
        }
        let matrix = self.sympl_matrix();
        let combo = matrix.solve_combination(&p.sympl_row())?;
        let mut prod = PauliOperator::identity(self.n);
        for i in combo.iter_ones() {
            prod = prod.mul(&self.generators[i]);
        }
        debug_assert_eq!(prod.unsigned(), p.unsigned());
        let member_sign = prod.sign().expect("products of Hermitian commuting ops");
        let query_sign = p.sign().expect("checked Hermitian");
        Some(member_sign * query_sign)
    }

    /// Membership of the unsigned vector only.
    pub fn contains_unsigned(&self, p: &PauliOperator) -> bool {
        if p.n() != self.n {
            return false;
        }
        self.sympl_matrix().solve_combination(&p.sympl_row()).is_some()
    }

    /// Product of the generator subset selected by `mask` (bit i picks
    /// generator i), with exact phase.
    pub fn subset_product(&self, mask: u64) -> PauliOperator {
        let mut prod = PauliOperator::identity(self.n);
        for (i, g) in self.generators.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                prod = prod.mul(g);
            }
        }
        prod
    }

    /// Projective measurement of a Hermitian Pauli.
    ///
    /// The lowest-index anticommuting generator becomes the pivot: it is
    /// multiplied into every other anticommuting generator (signs exact)
    /// and replaced by the signed measured operator.
    pub fn measure(&self, b: &PauliOperator, source: &mut OutcomeSource) -> Result<Measurement> {
        if b.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: b.n(),
            });
        }
        if !b.is_hermitian() {
            return Err(Error::NotHermitian(b.to_text()));
        }
        let anti: Vec<usize> = (0..self.generators.len())
            .filter(|&i| self.generators[i].sympl(b) == 1)
            .collect();
        if let Some((&pivot_idx, rest)) = anti.split_first() {
            let pivot = self.generators[pivot_idx].clone();
            let mut gens = self.generators.clone();
            for &i in rest {
                gens[i] = gens[i].mul(&pivot);
            }
            let outcome = source.next_sign()?;
            // The outcome is the eigenvalue of `b` as given, sign
            // included, matching the deterministic branch below.
            gens[pivot_idx] = match outcome {
                Sign::Plus => b.clone(),
                Sign::Minus => b.negated(),
            };
            return Ok(Measurement {
                group: StabiliserGroup::trusted(self.n, gens),
                outcome,
                kind: MeasureKind::Projected,
            });
        }
        if let Some(sign) = self.contains(b) {
            return Ok(Measurement {
                group: self.clone(),
                outcome: sign,
                kind: MeasureKind::Deterministic,
            });
        }
        let outcome = source.next_sign()?;
        Ok(Measurement {
            group: self.clone(),
            outcome,
            kind: MeasureKind::Uncoupled,
        })
    }

    /// Symplectic basis of `N(G)/G`: `n - rank` hyperbolic pairs of
    /// Hermitian representatives with `+` signs.
    ///
    /// The commutant of the generators is the kernel of the half-swapped
    /// generator matrix; coset representatives modulo the group are then
    /// paired by symplectic Gram-Schmidt.
    pub fn normaliser_logicals(&self) -> LogicalBasis {
        let n = self.n;
        let swapped = BitMatrix::from_rows(
            2 * n,
            self.generators
                .iter()
                .map(|g| g.z_bits().concat(g.x_bits()))
                .collect(),
        );
        let commutant = if self.generators.is_empty() {
            BitMatrix::identity(2 * n).rows
        } else {
            swapped.kernel()
        };

        // Coset representatives: commutant vectors independent of the
        // group rows. Incremental reduction keeps everything in the
        // commutant (the group rows are commutant members themselves).
        let mut echelon: Vec<(usize, BitVec)> = Vec::new();
        let insert = |v: &BitVec, echelon: &mut Vec<(usize, BitVec)>| -> Option<BitVec> {
            let mut red = v.clone();
            loop {
                let Some(lead) = red.first_one() else {
                    return None;
                };
                match echelon.iter().find(|(p, _)| *p == lead) {
                    Some((_, row)) => {
                        let row = row.clone();
                        red.xor_assign(&row);
                    }
                    None => {
                        echelon.push((lead, red.clone()));
                        return Some(red);
                    }
                }
            }
        };
        for g in &self.generators {
            let row = g.sympl_row();
            let added = insert(&row, &mut echelon);
            debug_assert!(added.is_some(), "generators are independent");
        }
        let mut reps: Vec<BitVec> = Vec::new();
        for v in &commutant {
            if let Some(red) = insert(v, &mut echelon) {
                reps.push(red);
            }
        }
        debug_assert_eq!(reps.len(), 2 * self.k());

        let sympl = |a: &BitVec, b: &BitVec| -> bool {
            a.slice(0, n).dot(&b.slice(n, 2 * n)) ^ a.slice(n, 2 * n).dot(&b.slice(0, n))
        };
        let mut pairs = Vec::new();
        while let Some(v1) = reps.first().cloned() {
            reps.remove(0);
            let partner = reps
                .iter()
                .position(|w| sympl(&v1, w))
                .expect("symplectic form is nondegenerate on the quotient");
            let v2 = reps.remove(partner);
            for w in reps.iter_mut() {
                if sympl(w, &v2) {
                    w.xor_assign(&v1);
                }
                if sympl(w, &v1) {
                    w.xor_assign(&v2);
                }
            }
            pairs.push((
                PauliOperator::from_sympl_row(&v1, 0),
                PauliOperator::from_sympl_row(&v2, 0),
            ));
        }
        LogicalBasis { pairs }
    }

    /// A Pauli anticommuting with generator i exactly where `pattern`
    /// has bit i set. Exists for any pattern since generators are
    /// independent.
    pub fn pauli_with_commutation(&self, pattern: &BitVec) -> PauliOperator {
        let n = self.n;
        let swapped = BitMatrix::from_rows(
            2 * n,
            self.generators
                .iter()
                .map(|g| g.z_bits().concat(g.x_bits()))
                .collect(),
        );
        let v = swapped
            .solve(pattern)
            .expect("independent generators make every pattern reachable");
        PauliOperator::from_sympl_row(&v, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliOperator as P;
    use alloc::vec;

    fn g(n: usize, gens: &[&str]) -> StabiliserGroup {
        StabiliserGroup::new(n, gens.iter().map(|s| P::parse(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn construction_rejects_anticommuting() {
        let err = StabiliserGroup::new(
            1,
            vec![P::parse("+X").unwrap(), P::parse("+Z").unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(_)));
    }

    #[test]
    fn construction_rejects_minus_identity() {
        let err = StabiliserGroup::new(
            1,
            vec![P::parse("+Z").unwrap(), P::parse("-Z").unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(ref m) if m.contains("-I")));
    }

    #[test]
    fn construction_rejects_dependent() {
        let err = StabiliserGroup::new(
            2,
            vec![
                P::parse("+ZI").unwrap(),
                P::parse("+IZ").unwrap(),
                P::parse("+ZZ").unwrap(),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(ref m) if m.contains("dependent")));
    }

    #[test]
    fn construction_rejects_imaginary_sign() {
        let err = StabiliserGroup::new(1, vec![P::parse("+iZ").unwrap()]).unwrap_err();
        assert!(matches!(err, Error::NotHermitian(_)));
    }

    #[test]
    fn canonicalise_matches_hand_reduction() {
        let group = g(2, &["+ZI", "+ZZ"]);
        let canon = group.canonicalise();
        let expect: Vec<P> = vec![P::parse("+ZI").unwrap(), P::parse("+IZ").unwrap()];
        assert_eq!(canon.generators(), &expect[..]);
        // idempotent
        assert_eq!(canon.canonicalise().generators(), canon.generators());
        // same span either way
        assert!(group.same_unsigned_span(&canon));
        assert_eq!(group.contains(&P::parse("+ZZ").unwrap()), Some(Sign::Plus));
        assert_eq!(canon.contains(&P::parse("+ZZ").unwrap()), Some(Sign::Plus));
    }

    #[test]
    fn canonical_form_is_presentation_independent() {
        let a = g(3, &["+ZZI", "+IZZ"]);
        let b = g(3, &["+ZIZ", "+IZZ"]);
        assert_eq!(
            a.canonicalise().generators(),
            b.canonicalise().generators()
        );
    }

    #[test]
    fn singleton_group_is_fixed_by_canonicalise() {
        let group = g(1, &["+Z"]);
        assert_eq!(group.canonicalise().generators(), group.generators());
    }

    #[test]
    fn contains_reports_signs() {
        let group = g(2, &["-ZI", "+IZ"]);
        // (-ZI)(+IZ) = -ZZ is the member, so +ZZ needs a minus.
        assert_eq!(group.contains(&P::parse("+ZZ").unwrap()), Some(Sign::Minus));
        assert_eq!(group.contains(&P::parse("-ZZ").unwrap()), Some(Sign::Plus));
        assert_eq!(group.contains(&P::parse("+XX").unwrap()), None);
        assert_eq!(group.contains(&P::parse("+ZI").unwrap()), Some(Sign::Minus));
        let id = P::identity(2);
        assert_eq!(group.contains(&id), Some(Sign::Plus));
    }

    #[test]
    fn measure_anticommuting_updates_group() {
        let group = g(1, &["+Z"]);
        let mut src = OutcomeSource::forced(vec![Sign::Plus]);
        let m = group.measure(&P::parse("+X").unwrap(), &mut src).unwrap();
        assert_eq!(m.kind, MeasureKind::Projected);
        assert_eq!(m.outcome, Sign::Plus);
        assert_eq!(m.group.generators(), &[P::parse("+X").unwrap()]);
    }

    #[test]
    fn measure_pivot_multiplies_other_anticommuting_generators() {
        let group = g(2, &["+ZI", "+ZZ"]);
        let mut src = OutcomeSource::forced(vec![Sign::Minus]);
        let m = group.measure(&P::parse("+XI").unwrap(), &mut src).unwrap();
        assert_eq!(m.kind, MeasureKind::Projected);
        // pivot ZI replaced by -XI; ZZ absorbed the pivot -> IZ
        assert_eq!(
            m.group.generators(),
            &[P::parse("-XI").unwrap(), P::parse("+IZ").unwrap()]
        );
    }

    #[test]
    fn measure_member_is_deterministic() {
        let group = g(1, &["+Z"]);
        let mut src = OutcomeSource::forced(vec![]);
        let m = group.measure(&P::parse("+Z").unwrap(), &mut src).unwrap();
        assert_eq!(m.kind, MeasureKind::Deterministic);
        assert_eq!(m.outcome, Sign::Plus);
        assert_eq!(m.group.generators(), group.generators());

        let group = g(2, &["+ZI", "-IZ"]);
        let m = group
            .measure(&P::parse("+ZZ").unwrap(), &mut OutcomeSource::forced(vec![]))
            .unwrap();
        assert_eq!(m.kind, MeasureKind::Deterministic);
        assert_eq!(m.outcome, Sign::Minus);
    }

    #[test]
    fn measure_uncoupled_is_flagged() {
        let group = g(2, &["+ZI"]);
        let mut src = OutcomeSource::forced(vec![Sign::Minus]);
        let m = group.measure(&P::parse("+IZ").unwrap(), &mut src).unwrap();
        assert_eq!(m.kind, MeasureKind::Uncoupled);
        assert_eq!(m.outcome, Sign::Minus);
        assert_eq!(m.group.generators(), group.generators());
    }

    #[test]
    fn measure_signed_operator_outcome_refers_to_it_as_given() {
        // Measuring -X with outcome +1 stabilises -X itself, not +X.
        let group = g(1, &["+Z"]);
        let mut src = OutcomeSource::forced(vec![Sign::Plus]);
        let m = group.measure(&P::parse("-X").unwrap(), &mut src).unwrap();
        assert_eq!(m.kind, MeasureKind::Projected);
        assert_eq!(m.outcome, Sign::Plus);
        assert_eq!(m.group.contains(&P::parse("-X").unwrap()), Some(Sign::Plus));
        assert_eq!(m.group.contains(&P::parse("+X").unwrap()), Some(Sign::Minus));

        // And outcome -1 flips it: the group gains +X.
        let mut src = OutcomeSource::forced(vec![Sign::Minus]);
        let m = group.measure(&P::parse("-X").unwrap(), &mut src).unwrap();
        assert_eq!(m.outcome, Sign::Minus);
        assert_eq!(m.group.contains(&P::parse("+X").unwrap()), Some(Sign::Plus));
    }

    #[test]
    fn normaliser_pairs_satisfy_symplectic_relations() {
        for (n, gens) in [(2usize, vec!["+ZI"]), (2, vec!["+ZZ"]), (3, vec!["+ZZI", "+IZZ"])] {
            let group = g(n, &gens);
            let basis = group.normaliser_logicals();
            assert_eq!(basis.k(), group.k());
            for (i, (xi, zi)) in basis.pairs.iter().enumerate() {
                for s in group.generators() {
                    assert!(s.commutes(xi), "X_{i} fails to commute with {s}");
                    assert!(s.commutes(zi), "Z_{i} fails to commute with {s}");
                }
                assert!(!group.contains_unsigned(xi));
                assert!(!group.contains_unsigned(zi));
                for (j, (xj, zj)) in basis.pairs.iter().enumerate() {
                    assert_eq!(xi.sympl(zj) == 1, i == j);
                    assert!(xi.commutes(xj));
                    assert!(zi.commutes(zj));
                }
            }
        }
    }

    #[test]
    fn normaliser_of_zz_lies_in_exhaustive_commutant() {
        // Oracle: enumerate all 16 unsigned 2-qubit Paulis and keep those
        // commuting with ZZ. Logical representatives must come from there.
        let group = g(2, &["+ZZ"]);
        let zz = P::parse("+ZZ").unwrap();
        let mut commutant = vec![];
        for a in ['I', 'X', 'Y', 'Z'] {
            for b in ['I', 'X', 'Y', 'Z'] {
                let mut p = P::identity(2);
                p.set_letter(0, a).unwrap();
                p.set_letter(1, b).unwrap();
                if p.commutes(&zz) {
                    commutant.push(p);
                }
            }
        }
        let basis = group.normaliser_logicals();
        assert_eq!(basis.k(), 1);
        let (x, z) = &basis.pairs[0];
        assert!(commutant.contains(&x.unsigned()));
        assert!(commutant.contains(&z.unsigned()));
        assert_eq!(x.sympl(z), 1);
    }

    #[test]
    fn full_rank_group_has_no_logicals() {
        let group = g(1, &["+Z"]);
        assert_eq!(group.normaliser_logicals().k(), 0);
        let group2 = g(2, &["+ZI", "+IZ"]);
        assert_eq!(group2.normaliser_logicals().k(), 0);
    }

    #[test]
    fn pauli_with_commutation_hits_pattern() {
        let group = g(3, &["+ZZI", "+IZZ", "+XXX"]);
        for mask in 0u64..8 {
            let pattern = BitVec::from_bools(&[mask & 1 == 1, mask & 2 == 2, mask & 4 == 4]);
            let p = group.pauli_with_commutation(&pattern);
            for (i, s) in group.generators().iter().enumerate() {
                assert_eq!(p.sympl(s) == 1, pattern.get(i));
            }
        }
    }

    #[test]
    fn subset_product_tracks_signs() {
        let group = g(2, &["-ZI", "+IZ"]);
        assert_eq!(group.subset_product(0b11), P::parse("-ZZ").unwrap());
        assert_eq!(group.subset_product(0), P::identity(2));
    }
}
