//! Conjugate generating sets and reversible group pairs.
//!
//! Two equal-rank stabiliser groups A and B form a reversible pair when
//! generating sets exist of the form `S ∪ {a_i}` and `S ∪ {b_i}` with
//! `S = A ∩ B` and `a_i` anticommuting with `b_j` exactly when `i == j`.
//! Detection reduces to invertibility of the quotient commutation matrix
//! over GF(2); when it is invertible the `b` basis is re-based through the
//! inverse so the biorthogonality becomes literal.

use crate::bits::{BitMatrix, BitVec};
use crate::error::{Error, Result};
use crate::group::StabiliserGroup;
use crate::pauli::{PauliOperator, Sign};
use alloc::format;
use alloc::vec::Vec;

/// A reversible pair together with its conjugate bases.
///
/// Stored invariants: `intersection = group_a ∩ group_b`; `basis_a` spans
/// `group_a` above the intersection (each element a signed member of
/// `group_a`, likewise `basis_b` for `group_b`); `basis_a[i]` anticommutes
/// with `basis_b[j]` iff `i == j`.
#[derive(Clone, Debug)]
pub struct ConjugatePair {
    group_a: StabiliserGroup,
    group_b: StabiliserGroup,
    intersection: StabiliserGroup,
    basis_a: Vec<PauliOperator>,
    basis_b: Vec<PauliOperator>,
    /// Quotient commutation matrix before re-basing, kept for audit.
    commutation_before: Vec<BitVec>,
}

/// Certificate that a pair is not reversible: a quotient element of one
/// group commuting with the whole quotient of the other.
#[derive(Clone, Debug)]
pub struct Witness {
    pub element: PauliOperator,
    /// True if the element came from the A side.
    pub from_a: bool,
    /// Commutation bits against the other side's quotient transversal
    /// (all zero, which is exactly the obstruction).
    pub commutation: BitVec,
}

#[derive(Clone, Debug)]
pub enum Reversibility {
    Reversible(ConjugatePair),
    NotReversible(Witness),
}

impl Reversibility {
    pub fn is_reversible(&self) -> bool {
        matches!(self, Reversibility::Reversible(_))
    }

    pub fn into_pair(self) -> Option<ConjugatePair> {
        match self {
            Reversibility::Reversible(p) => Some(p),
            Reversibility::NotReversible(_) => None,
        }
    }
}

/// Intersection of two stabiliser groups with exact signs.
///
/// The unsigned intersection comes from a Zassenhaus-style double-width
/// row reduction; each element is then signed by membership in both
/// groups. Disagreeing signs mean the groups share no eigenspace.
pub fn group_intersection(a: &StabiliserGroup, b: &StabiliserGroup) -> Result<StabiliserGroup> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let width = 2 * a.n();
    let mut mat = BitMatrix::new(2 * width);
    for g in a.generators() {
        let row = g.sympl_row();
        mat.push(row.concat(&row));
    }
    for g in b.generators() {
        let row = g.sympl_row();
        mat.push(row.concat(&BitVec::zeros(width)));
    }
    mat.rref();
    let mut members = Vec::new();
    for row in &mat.rows {
        let left = row.slice(0, width);
        let right = row.slice(width, 2 * width);
        if left.is_zero() && !right.is_zero() {
            let unsigned = PauliOperator::from_sympl_row(&right, 0);
            let sign_a = a
                .contains(&unsigned)
                .expect("intersection row must be in A");
            let sign_b = b
                .contains(&unsigned)
                .expect("intersection row must be in B");
            if sign_a != sign_b {
                return Err(Error::SignConflict(unsigned.to_text()));
            }
            members.push(unsigned.with_sign(sign_a));
        }
    }
    StabiliserGroup::new(a.n(), members)
}

/// Representatives of `group / sub` as signed members of `group`,
/// obtained by reducing the canonical generators modulo `sub` with exact
/// Pauli products. Deterministic given the canonical forms.
fn quotient_transversal(group: &StabiliserGroup, sub: &StabiliserGroup) -> Vec<PauliOperator> {
    let sub_rows: Vec<PauliOperator> = sub.canonicalise().generators().to_vec();
    let sub_pivots: Vec<(usize, PauliOperator)> = sub_rows
        .iter()
        .map(|p| (p.sympl_row().first_one().expect("no identity generators"), p.clone()))
        .collect();
    let mut quotient: Vec<(usize, PauliOperator)> = Vec::new();
    for g in group.canonicalise().generators() {
        let mut p = g.clone();
        for (pivot, row) in &sub_pivots {
            if p.sympl_row().get(*pivot) {
                p = p.mul(row);
            }
        }
        loop {
            let Some(lead) = p.sympl_row().first_one() else {
                break; // reduced into the subgroup
            };
            match quotient.iter().find(|(q, _)| *q == lead) {
                Some((_, row)) => p = p.mul(&row.clone()),
                None => {
                    quotient.push((lead, p));
                    break;
                }
            }
        }
    }
    quotient.sort_by_key(|(pivot, _)| *pivot);
    quotient.into_iter().map(|(_, p)| p).collect()
}

/// Decide reversibility of `(a, b)` and build the conjugate bases.
pub fn check_reversible(a: &StabiliserGroup, b: &StabiliserGroup) -> Result<Reversibility> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let intersection = group_intersection(a, b)?;
    let basis_a = quotient_transversal(a, &intersection);
    let basis_b = quotient_transversal(b, &intersection);
    let (na, nb) = (basis_a.len(), basis_b.len());
    let m = BitMatrix::from_rows(
        nb,
        basis_a
            .iter()
            .map(|ai| BitVec::from_bools(&basis_b.iter().map(|bj| ai.sympl(bj) == 1).collect::<Vec<_>>()))
            .collect(),
    );

    let inverse = if na == nb { m.inverse() } else { None };
    let Some(inv) = inverse else {
        // Left kernel: a combination of a_i commuting with every b_j.
        // If the left kernel is trivial the right kernel cannot be.
        let left = BitMatrix::from_rows(na, m.transpose().rows.clone()).kernel();
        let witness = if let Some(v) = left.first() {
            let mut w = PauliOperator::identity(a.n());
            for i in v.iter_ones() {
                w = w.mul(&basis_a[i]);
            }
            Witness {
                commutation: BitVec::from_bools(
                    &basis_b.iter().map(|bj| w.sympl(bj) == 1).collect::<Vec<_>>(),
                ),
                element: w,
                from_a: true,
            }
        } else {
            let right = m.kernel();
            let v = right.first().expect("singular matrix has a kernel side");
            let mut w = PauliOperator::identity(a.n());
            for j in v.iter_ones() {
                w = w.mul(&basis_b[j]);
            }
            Witness {
                commutation: BitVec::from_bools(
                    &basis_a.iter().map(|ai| w.sympl(ai) == 1).collect::<Vec<_>>(),
                ),
                element: w,
                from_a: false,
            }
        };
        debug_assert!(witness.commutation.is_zero());
        return Ok(Reversibility::NotReversible(witness));
    };

    // b'_j = prod_k b_k^{inv[k][j]} makes sympl(a_i, b'_j) = delta_ij.
    let mut rebased = Vec::with_capacity(nb);
    for j in 0..nb {
        let mut p = PauliOperator::identity(a.n());
        for (k, bk) in basis_b.iter().enumerate() {
            if inv.rows[k].get(j) {
                p = p.mul(bk);
            }
        }
        rebased.push(p);
    }
    let pair = ConjugatePair::assemble(
        a.clone(),
        b.clone(),
        intersection,
        basis_a,
        rebased,
        m.rows,
    )?;
    Ok(Reversibility::Reversible(pair))
}

impl ConjugatePair {
    fn assemble(
        group_a: StabiliserGroup,
        group_b: StabiliserGroup,
        intersection: StabiliserGroup,
        basis_a: Vec<PauliOperator>,
        basis_b: Vec<PauliOperator>,
        commutation_before: Vec<BitVec>,
    ) -> Result<Self> {
        let pair = ConjugatePair {
            group_a,
            group_b,
            intersection,
            basis_a,
            basis_b,
            commutation_before,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Build a pair from externally constructed bases (e.g. hand-chosen
    /// local ones). Everything is re-validated; the intersection is
    /// recomputed rather than trusted.
    pub fn from_parts(
        group_a: StabiliserGroup,
        group_b: StabiliserGroup,
        basis_a: Vec<PauliOperator>,
        basis_b: Vec<PauliOperator>,
    ) -> Result<Self> {
        let intersection = group_intersection(&group_a, &group_b)?;
        let commutation = basis_a
            .iter()
            .map(|ai| {
                BitVec::from_bools(&basis_b.iter().map(|bj| ai.sympl(bj) == 1).collect::<Vec<_>>())
            })
            .collect();
        Self::assemble(group_a, group_b, intersection, basis_a, basis_b, commutation)
    }

    /// Re-check every stored invariant.
    pub fn validate(&self) -> Result<()> {
        let n_m = self.basis_a.len();
        if self.basis_b.len() != n_m {
            return Err(Error::InvalidGroup(format!(
                "basis sizes differ: {} vs {}",
                n_m,
                self.basis_b.len()
            )));
        }
        if self.group_a.rank() != self.group_b.rank() {
            return Err(Error::InvalidGroup(format!(
                "group ranks differ: {} vs {}",
                self.group_a.rank(),
                self.group_b.rank()
            )));
        }
        let recomputed = group_intersection(&self.group_a, &self.group_b)?;
        if !recomputed.same_unsigned_span(&self.intersection) {
            return Err(Error::InvalidGroup(
                alloc::string::String::from("stored intersection is wrong"),
            ));
        }
        if self.intersection.rank() + n_m != self.group_a.rank() {
            return Err(Error::InvalidGroup(format!(
                "basis size {} does not bridge intersection rank {} to group rank {}",
                n_m,
                self.intersection.rank(),
                self.group_a.rank()
            )));
        }
        for (basis, group, name) in [
            (&self.basis_a, &self.group_a, "a"),
            (&self.basis_b, &self.group_b, "b"),
        ] {
            for p in basis.iter() {
                if group.contains(p) != Some(Sign::Plus) {
                    return Err(Error::InvalidGroup(format!(
                        "basis_{name} element {} is not a signed member of its group",
                        p.to_text()
                    )));
                }
            }
            // Independence above the intersection.
            let mut mat = self.intersection.sympl_matrix();
            for p in basis.iter() {
                mat.push(p.sympl_row());
            }
            if mat.rank() != self.intersection.rank() + n_m {
                return Err(Error::InvalidGroup(format!(
                    "basis_{name} is dependent modulo the intersection"
                )));
            }
        }
        for (i, ai) in self.basis_a.iter().enumerate() {
            for (j, bj) in self.basis_b.iter().enumerate() {
                let want = u8::from(i == j);
                if ai.sympl(bj) != want {
                    return Err(Error::InvalidGroup(format!(
                        "biorthogonality fails at ({i}, {j}): {} vs {}",
                        ai.to_text(),
                        bj.to_text()
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.group_a.n()
    }

    /// Number of conjugate basis pairs (measurements per transition).
    #[inline]
    pub fn n_m(&self) -> usize {
        self.basis_a.len()
    }

    pub fn group_a(&self) -> &StabiliserGroup {
        &self.group_a
    }

    pub fn group_b(&self) -> &StabiliserGroup {
        &self.group_b
    }

    pub fn intersection(&self) -> &StabiliserGroup {
        &self.intersection
    }

    pub fn basis_a(&self) -> &[PauliOperator] {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &[PauliOperator] {
        &self.basis_b
    }

    pub fn commutation_before(&self) -> &[BitVec] {
        &self.commutation_before
    }

    /// The same pair traversed in the opposite direction.
    pub fn swapped(&self) -> ConjugatePair {
        ConjugatePair {
            group_a: self.group_b.clone(),
            group_b: self.group_a.clone(),
            intersection: self.intersection.clone(),
            basis_a: self.basis_b.clone(),
            basis_b: self.basis_a.clone(),
            commutation_before: self.commutation_before.clone(),
        }
    }

    /// `prod_i basis_b[i]^{bit i of mask}` with exact phase.
    pub fn product_b(&self, mask: u64) -> PauliOperator {
        let mut p = PauliOperator::identity(self.n());
        for (i, b) in self.basis_b.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                p = p.mul(b);
            }
        }
        p
    }

    /// `prod_i basis_a[i]^{bit i of mask}` with exact phase.
    pub fn product_a(&self, mask: u64) -> PauliOperator {
        let mut p = PauliOperator::identity(self.n());
        for (i, a) in self.basis_a.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                p = p.mul(a);
            }
        }
        p
    }

    /// Group B with the `b_i` signs flipped according to `mask`
    /// (bit i = 1 flips `basis_b[i]`): the stabiliser of the outcome
    /// eigenspace labelled by `mask`.
    pub fn group_b_signed(&self, mask: u64) -> StabiliserGroup {
        let mut gens: Vec<PauliOperator> = self.intersection.generators().to_vec();
        for (i, b) in self.basis_b.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                gens.push(b.negated());
            } else {
                gens.push(b.clone());
            }
        }
        StabiliserGroup::trusted(self.n(), gens)
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
    fn intersection_of_disjoint_groups_is_trivial() {
        let s = group_intersection(&g(1, &["+Z"]), &g(1, &["+X"])).unwrap();
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn intersection_finds_shared_products() {
        // ZZ lies in both groups even though it is a generator of neither
        // presentation of A.
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+ZZ", "+XX"]);
        let s = group_intersection(&a, &b).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.contains(&P::parse("+ZZ").unwrap()), Some(Sign::Plus));
    }

    #[test]
    fn intersection_sign_conflict_is_detected() {
        let a = g(2, &["+ZZ", "+XX"]);
        let b = g(2, &["-ZZ", "+XX"]);
        let err = group_intersection(&a, &b).unwrap_err();
        assert!(matches!(err, Error::SignConflict(ref w) if w.contains("ZZ")));
    }

    #[test]
    fn intersection_respects_negative_members() {
        let a = g(2, &["-ZZ", "+XX"]);
        let b = g(2, &["-ZZ"]);
        let s = group_intersection(&a, &b).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.contains(&P::parse("-ZZ").unwrap()), Some(Sign::Plus));
    }

    #[test]
    fn single_qubit_pair_is_reversible() {
        let rev = check_reversible(&g(1, &["+Z"]), &g(1, &["+X"])).unwrap();
        let pair = rev.into_pair().unwrap();
        assert_eq!(pair.n_m(), 1);
        assert_eq!(pair.basis_a(), &[P::parse("+Z").unwrap()]);
        assert_eq!(pair.basis_b(), &[P::parse("+X").unwrap()]);
        assert_eq!(pair.intersection().rank(), 0);
    }

    #[test]
    fn rebasing_produces_biorthogonal_basis() {
        // A = <Z1, Z2>, B presented as <X1X2, X2>: the commutation matrix
        // is [[1,0],[1,1]] and re-basing must deliver {X1, X2}.
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XX", "+IX"]);
        let pair = check_reversible(&a, &b).unwrap().into_pair().unwrap();
        assert_eq!(pair.n_m(), 2);
        assert_eq!(
            pair.basis_b(),
            &[P::parse("+XI").unwrap(), P::parse("+IX").unwrap()]
        );
        pair.validate().unwrap();
    }

    #[test]
    fn bell_pair_groups_are_not_reversible() {
        let rev = check_reversible(&g(2, &["+ZZ"]), &g(2, &["+XX"])).unwrap();
        let Reversibility::NotReversible(w) = rev else {
            panic!("ZZ/XX commute, the pair cannot be reversible");
        };
        assert_eq!(w.element.unsigned(), P::parse("+ZZ").unwrap());
        assert!(w.commutation.is_zero());
    }

    #[test]
    fn rank_mismatch_yields_witness() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+ZI"]);
        let rev = check_reversible(&a, &b).unwrap();
        let Reversibility::NotReversible(w) = rev else {
            panic!("rank mismatch cannot be reversible");
        };
        assert!(w.from_a);
        assert_eq!(w.element.unsigned(), P::parse("+IZ").unwrap());
    }

    #[test]
    fn identical_groups_make_a_trivial_pair() {
        let a = g(2, &["+ZI", "+IZ"]);
        let pair = check_reversible(&a, &a).unwrap().into_pair().unwrap();
        assert_eq!(pair.n_m(), 0);
        assert_eq!(pair.intersection().rank(), 2);
    }

    #[test]
    fn negative_signs_survive_the_pipeline() {
        let a = g(2, &["-ZI", "+IZ"]);
        let b = g(2, &["+XI", "-IX"]);
        let pair = check_reversible(&a, &b).unwrap().into_pair().unwrap();
        assert_eq!(pair.n_m(), 2);
        for p in pair.basis_a() {
            assert_eq!(pair.group_a().contains(p), Some(Sign::Plus));
        }
        for p in pair.basis_b() {
            assert_eq!(pair.group_b().contains(p), Some(Sign::Plus));
        }
        pair.validate().unwrap();
    }

    #[test]
    fn from_parts_rejects_wrong_sign_members() {
        let a = g(1, &["+Z"]);
        let b = g(1, &["+X"]);
        let err = ConjugatePair::from_parts(
            a,
            b,
            vec![P::parse("-Z").unwrap()],
            vec![P::parse("+X").unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(_)));
    }

    #[test]
    fn from_parts_rejects_broken_biorthogonality() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XI", "+IX"]);
        let err = ConjugatePair::from_parts(
            a,
            b,
            vec![P::parse("+ZI").unwrap(), P::parse("+IZ").unwrap()],
            // b_1 anticommutes with both a_1 and a_2
            vec![P::parse("+XX").unwrap(), P::parse("+IX").unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(ref m) if m.contains("biorthogonality")));
    }

    #[test]
    fn rebased_products_carry_exact_phase() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XI", "-IX"]);
        let pair = check_reversible(&a, &b).unwrap().into_pair().unwrap();
        assert_eq!(pair.product_b(0b00), P::identity(2));
        assert_eq!(pair.product_b(0b11), pair.basis_b()[0].mul(&pair.basis_b()[1]));
        let pb = pair.product_b(0b11);
        assert!(pb.is_hermitian());
    }

    #[test]
    fn group_b_signed_flips_selected_generators() {
        let a = g(1, &["+Z"]);
        let b = g(1, &["+X"]);
        let pair = check_reversible(&a, &b).unwrap().into_pair().unwrap();
        let minus = pair.group_b_signed(0b1);
        assert_eq!(minus.contains(&P::parse("-X").unwrap()), Some(Sign::Plus));
    }

    #[test]
    fn swapped_pair_still_validates() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XX", "+IX"]);
        let pair = check_reversible(&a, &b).unwrap().into_pair().unwrap();
        let sw = pair.swapped();
        sw.validate().unwrap();
        assert_eq!(sw.basis_a(), pair.basis_b());
    }
}
