//! Qubit geometry and locality checks.
//!
//! Distances are Euclidean, optionally with periodic boundaries (minimum
//! over image shifts, taken per axis). Threshold comparisons carry a 1e-9
//! slack so integral lattices never flake at exact boundaries.

use crate::conjugacy::ConjugatePair;
use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

const SLACK: f64 = 1e-9;

/// Euclidean point set the qubits live on, with optional periodicity.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    positions: Vec<Vec<f64>>,
    period: Option<Vec<f64>>,
}

impl Lattice {
    pub fn euclidean(dim: usize, positions: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(dim, positions, None)
    }

    /// Periodic boundaries: axis k wraps with period `period[k]`.
    pub fn torus(dim: usize, positions: Vec<Vec<f64>>, period: Vec<f64>) -> Result<Self> {
        Self::build(dim, positions, Some(period))
    }

    fn build(dim: usize, positions: Vec<Vec<f64>>, period: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParameter(String::from("lattice dim must be >= 1")));
        }
        for (i, p) in positions.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::BadParameter(format!(
                    "position {i} has {} coordinates, lattice dim is {dim}",
                    p.len()
                )));
            }
        }
        if let Some(per) = &period {
            if per.len() != dim {
                return Err(Error::BadParameter(format!(
                    "period has {} entries, lattice dim is {dim}",
                    per.len()
                )));
            }
            if per.iter().any(|&l| l <= 0.0) {
                return Err(Error::BadParameter(String::from(
                    "period entries must be positive",
                )));
            }
        }
        Ok(Lattice {
            dim,
            positions,
            period,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn period(&self) -> Option<&[f64]> {
        self.period.as_deref()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.positions[i], &self.positions[j]);
        let mut sq = 0.0;
        for k in 0..self.dim {
            let mut d = libm::fabs(a[k] - b[k]);
            if let Some(per) = &self.period {
                d = libm::fmod(d, per[k]);
                d = if d > per[k] - d { per[k] - d } else { d };
            }
            sq += d * d;
        }
        libm::sqrt(sq)
    }

    /// Maximum pairwise distance inside a region.
    pub fn diameter(&self, region: &[usize]) -> Result<f64> {
        if region.is_empty() {
            return Err(Error::BadParameter(String::from(
                "diameter of an empty region",
            )));
        }
        let mut best = 0.0f64;
        for (a, &i) in region.iter().enumerate() {
            for &j in &region[a + 1..] {
                let d = self.distance(i, j);
                if d > best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// Diameter of the whole qubit set (0 for n <= 1).
    pub fn full_diameter(&self) -> f64 {
        if self.n() < 2 {
            return 0.0;
        }
        let all: Vec<usize> = (0..self.n()).collect();
        self.diameter(&all).unwrap()
    }

    /// All qubits within `rho` of the region, the region included.
    /// Sorted, deduplicated.
    pub fn neighbourhood(&self, region: &[usize], rho: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for q in 0..self.n() {
            let near = region
                .iter()
                .any(|&r| self.distance(q, r) <= rho + SLACK);
            if near {
                out.push(q);
            }
        }
        out
    }
}

/// One conjugate basis element whose support diameter exceeds the bound.
#[derive(Clone, Debug)]
pub struct LocalityViolation {
    /// True when the element sits in the `a` basis, false for `b`.
    pub side_a: bool,
    pub index: usize,
    pub diameter: f64,
}

#[derive(Clone, Debug)]
pub struct LocalityReport {
    pub bound: f64,
    pub max_diameter: f64,
    pub violations: Vec<LocalityViolation>,
}

impl LocalityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every conjugate basis element against the support-diameter
/// bound `l`.
pub fn check_local_reversibility(
    pair: &ConjugatePair,
    lat: &Lattice,
    l: f64,
) -> Result<LocalityReport> {
    if lat.n() != pair.n() {
        return Err(Error::LengthMismatch {
            expected: pair.n(),
            got: lat.n(),
        });
    }
    let mut report = LocalityReport {
        bound: l,
        max_diameter: 0.0,
        violations: Vec::new(),
    };
    for (side_a, basis) in [(true, pair.basis_a()), (false, pair.basis_b())] {
        for (index, p) in basis.iter().enumerate() {
            let d = lat.diameter(&p.support())?;
            if d > report.max_diameter {
                report.max_diameter = d;
            }
            if d > l + SLACK {
                report.violations.push(LocalityViolation {
                    side_a,
                    index,
                    diameter: d,
                });
            }
        }
    }
    Ok(report)
}

/// Multiply `p` into the centraliser of the `b` basis: returns `a * p`
/// with `a` the product of the `a_i` whose partner `b_i` anticommutes
/// with `p`. For an l-locally reversible pair the result is supported on
/// the 2l-neighbourhood of `supp(p)`.
pub fn relocalise(pair: &ConjugatePair, p: &PauliOperator) -> PauliOperator {
    let mut a = PauliOperator::identity(pair.n());
    for (ai, bi) in pair.basis_a().iter().zip(pair.basis_b()) {
        if p.sympl(bi) == 1 {
            a = a.mul(ai);
        }
    }
    a.mul(p)
}

/// How a Pauli error interacts with the pair's measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Anticommutes with the common subgroup: flips a persistent check.
    Detectable,
    /// Equivalent, modulo the `a` basis, to an element of group B:
    /// absorbed without touching logical content.
    SelfCorrecting,
    /// Commutes with every check yet acts on the logical space.
    UndetectableLogical,
}

pub fn classify_error(pair: &ConjugatePair, e: &PauliOperator) -> ErrorClass {
    let detected = pair
        .intersection()
        .generators()
        .iter()
        .any(|s| e.sympl(s) == 1);
    if detected {
        return ErrorClass::Detectable;
    }
    let folded = relocalise(pair, e);
    if pair.group_b().contains_unsigned(&folded) {
        ErrorClass::SelfCorrecting
    } else {
        ErrorClass::UndetectableLogical
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::check_reversible;
    use crate::group::StabiliserGroup;
    use crate::pauli::PauliOperator as P;
    use alloc::vec;

    fn g(n: usize, gens: &[&str]) -> StabiliserGroup {
        StabiliserGroup::new(n, gens.iter().map(|s| P::parse(s).unwrap()).collect()).unwrap()
    }

    fn pair(a: &StabiliserGroup, b: &StabiliserGroup) -> ConjugatePair {
        check_reversible(a, b).unwrap().into_pair().unwrap()
    }

    #[test]
    fn euclidean_distance_is_exact_on_integers() {
        let lat = Lattice::euclidean(2, vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(lat.distance(0, 1), 5.0);
        assert_eq!(lat.diameter(&[0, 1]).unwrap(), 5.0);
        assert_eq!(lat.diameter(&[1]).unwrap(), 0.0);
        assert!(lat.diameter(&[]).is_err());
    }

    #[test]
    fn torus_distance_takes_the_short_way_round() {
        let lat = Lattice::torus(1, vec![vec![0.0], vec![3.0]], vec![4.0]).unwrap();
        assert_eq!(lat.distance(0, 1), 1.0);
        let open = Lattice::euclidean(1, vec![vec![0.0], vec![3.0]]).unwrap();
        assert_eq!(open.distance(0, 1), 3.0);
    }

    #[test]
    fn neighbourhood_grows_with_rho() {
        let lat =
            Lattice::euclidean(1, (0..5).map(|i| vec![i as f64]).collect()).unwrap();
        assert_eq!(lat.neighbourhood(&[0], 0.0), vec![0]);
        assert_eq!(lat.neighbourhood(&[0], 1.0), vec![0, 1]);
        assert_eq!(lat.neighbourhood(&[0], lat.full_diameter()), vec![0, 1, 2, 3, 4]);
        let r1 = lat.neighbourhood(&[2], 1.0);
        let r2 = lat.neighbourhood(&[2], 2.0);
        assert!(r1.iter().all(|q| r2.contains(q)));
    }

    #[test]
    fn locality_report_flags_wide_elements() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XX", "+IX"]);
        let p = pair(&a, &b);
        // Re-based b basis is single-site, so any l >= 0 passes.
        let lat = Lattice::euclidean(1, vec![vec![0.0], vec![1.0]]).unwrap();
        let rep = check_local_reversibility(&p, &lat, 0.0).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.max_diameter, 0.0);

        // A two-site element on a stretched lattice violates a small bound.
        let a2 = g(2, &["+ZI", "+IZ"]);
        let b2 = g(2, &["+XX", "+ZZ"]);
        let p2 = pair(&a2, &b2);
        let far = Lattice::euclidean(1, vec![vec![0.0], vec![10.0]]).unwrap();
        let rep2 = check_local_reversibility(&p2, &far, 1.0).unwrap();
        assert!(!rep2.pass());
        assert!(rep2.max_diameter >= 10.0);
        assert!(!rep2.violations.is_empty());
    }

    #[test]
    fn relocalise_cancels_the_conjugate_partner() {
        let p = pair(&g(1, &["+Z"]), &g(1, &["+X"]));
        let out = relocalise(&p, &P::parse("+Z").unwrap());
        assert!(out.is_identity_bits());
    }

    #[test]
    fn relocalise_output_commutes_with_b_basis() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XX", "+IX"]);
        let pr = pair(&a, &b);
        for text in ["+XI", "+YZ", "+ZY", "+XY", "+YY", "+ZZ"] {
            let e = P::parse(text).unwrap();
            let out = relocalise(&pr, &e);
            for bi in pr.basis_b() {
                assert_eq!(out.sympl(bi), 0, "failed on {text}");
            }
        }
    }

    #[test]
    fn relocalise_leaves_commuting_errors_alone() {
        let pr = pair(&g(1, &["+Z"]), &g(1, &["+X"]));
        let e = P::parse("+X").unwrap();
        assert_eq!(relocalise(&pr, &e), e);
    }

    #[test]
    fn error_classification_on_a_bare_logical_qubit() {
        // One measured qubit, one untouched logical qubit.
        let pr = pair(&g(2, &["+ZI"]), &g(2, &["+XI"]));
        assert_eq!(
            classify_error(&pr, &P::parse("+IZ").unwrap()),
            ErrorClass::UndetectableLogical
        );
        for text in ["+ZI", "+XI", "+YI"] {
            assert_eq!(
                classify_error(&pr, &P::parse(text).unwrap()),
                ErrorClass::SelfCorrecting,
                "failed on {text}"
            );
        }
    }

    #[test]
    fn errors_hitting_the_common_subgroup_are_detectable() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+ZZ", "+XX"]);
        let pr = pair(&a, &b);
        assert_eq!(pr.intersection().rank(), 1);
        assert_eq!(
            classify_error(&pr, &P::parse("+XI").unwrap()),
            ErrorClass::Detectable
        );
        // b basis elements are always absorbed.
        let b0 = pr.basis_b()[0].clone();
        assert_eq!(classify_error(&pr, &b0), ErrorClass::SelfCorrecting);
    }
}
