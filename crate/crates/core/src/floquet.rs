//! Floquet sequence execution: step through a chain of instantaneous
//! stabiliser groups, track logical representatives across transitions,
//! and extract the logical action of a full period.
//!
//! Sign discipline: logicals are rewritten *before* the measurements of
//! a transition, and the rewrite sign is taken from the current signed
//! run group, so every representative keeps its expectation value
//! exactly, outcome stream by outcome stream.

use crate::bits::{BitMatrix, BitVec};
use crate::conjugacy::{check_reversible, ConjugatePair, Reversibility};
use crate::error::{Error, Result};
use crate::group::{LogicalBasis, MeasureKind, StabiliserGroup};
use crate::lattice::{check_local_reversibility, Lattice};
use crate::outcome::OutcomeSource;
use crate::pauli::{PauliOperator, Sign};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// An ordered chain of instantaneous stabiliser groups with one
/// validated reversible pair per transition.
#[derive(Clone, Debug)]
pub struct FloquetSequence {
    isgs: Vec<StabiliserGroup>,
    pairs: Vec<ConjugatePair>,
    lattice: Option<Lattice>,
    locality_bound: Option<f64>,
}

impl FloquetSequence {
    /// Build from the groups alone; conjugate bases are derived by the
    /// reversibility check on each adjacent pair.
    pub fn from_isgs(isgs: Vec<StabiliserGroup>) -> Result<Self> {
        if isgs.len() < 2 {
            return Err(Error::BadParameter(String::from(
                "a sequence needs at least two groups",
            )));
        }
        let mut pairs = Vec::with_capacity(isgs.len() - 1);
        for (t, window) in isgs.windows(2).enumerate() {
            match check_reversible(&window[0], &window[1])? {
                Reversibility::Reversible(p) => pairs.push(p),
                Reversibility::NotReversible(w) => {
                    return Err(Error::InvalidGroup(format!(
                        "transition {t} is not reversible: {} commutes with the whole opposite quotient",
                        w.element.to_text()
                    )));
                }
            }
        }
        Ok(FloquetSequence {
            isgs,
            pairs,
            lattice: None,
            locality_bound: None,
        })
    }

    /// Build from pre-constructed pairs (e.g. with hand-chosen local
    /// bases). Adjacent pairs must share their boundary group exactly,
    /// signs included.
    pub fn with_pairs(pairs: Vec<ConjugatePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::BadParameter(String::from(
                "a sequence needs at least one transition",
            )));
        }
        let mut isgs = Vec::with_capacity(pairs.len() + 1);
        isgs.push(pairs[0].group_a().clone());
        for (t, window) in pairs.windows(2).enumerate() {
            let left = window[0].group_b().canonicalise();
            let right = window[1].group_a().canonicalise();
            if left.generators() != right.generators() {
                return Err(Error::GroupMismatch(format!(
                    "pair {t} ends in a different group than pair {} starts from",
                    t + 1
                )));
            }
        }
        for p in &pairs {
            p.validate()?;
            isgs.push(p.group_b().clone());
        }
        Ok(FloquetSequence {
            isgs,
            pairs,
            lattice: None,
            locality_bound: None,
        })
    }

    /// Attach a lattice and locality bound; every transition must pass
    /// the support-diameter check.
    pub fn with_lattice(mut self, lattice: Lattice, l: f64) -> Result<Self> {
        for (t, pair) in self.pairs.iter().enumerate() {
            let report = check_local_reversibility(pair, &lattice, l)?;
            if !report.pass() {
                return Err(Error::BadParameter(format!(
                    "transition {t} violates the locality bound {l}: max diameter {}",
                    report.max_diameter
                )));
            }
        }
        self.lattice = Some(lattice);
        self.locality_bound = Some(l);
        Ok(self)
    }

    #[inline]
    pub fn tau(&self) -> usize {
        self.isgs.len()
    }

    pub fn isgs(&self) -> &[StabiliserGroup] {
        &self.isgs
    }

    pub fn pairs(&self) -> &[ConjugatePair] {
        &self.pairs
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    pub fn locality_bound(&self) -> Option<f64> {
        self.locality_bound
    }

    pub fn n(&self) -> usize {
        self.isgs[0].n()
    }

    /// Total number of measurements in one pass.
    pub fn total_measurements(&self) -> usize {
        self.pairs.iter().map(|p| p.n_m()).sum()
    }

    /// First and last group agree as unsigned groups.
    pub fn is_periodic(&self) -> bool {
        self.isgs[0].same_unsigned_span(self.isgs.last().expect("non-empty"))
    }

    pub fn initial_logicals(&self) -> LogicalBasis {
        self.isgs[0].normaliser_logicals()
    }

    /// Re-run every structural check and summarise.
    pub fn validate(&self) -> Result<SequenceReport> {
        let rank = self.isgs[0].rank();
        for (t, g) in self.isgs.iter().enumerate() {
            if g.rank() != rank {
                return Err(Error::InvalidGroup(format!(
                    "group {t} has rank {} but the sequence started at {rank}",
                    g.rank()
                )));
            }
        }
        let mut transitions = Vec::with_capacity(self.pairs.len());
        for (t, pair) in self.pairs.iter().enumerate() {
            pair.validate()?;
            if !pair.group_a().same_unsigned_span(&self.isgs[t])
                || !pair.group_b().same_unsigned_span(&self.isgs[t + 1])
            {
                return Err(Error::GroupMismatch(format!(
                    "pair {t} does not connect groups {t} and {}",
                    t + 1
                )));
            }
            let (max_diameter, locality_pass) = match (&self.lattice, self.locality_bound) {
                (Some(lat), Some(l)) => {
                    let rep = check_local_reversibility(pair, lat, l)?;
                    (Some(rep.max_diameter), Some(rep.pass()))
                }
                _ => (None, None),
            };
            transitions.push(TransitionReport {
                index: t,
                n_m: pair.n_m(),
                max_diameter,
                locality_pass,
            });
        }
        Ok(SequenceReport {
            tau: self.tau(),
            rank,
            logical_qubits: self.isgs[0].k(),
            periodic: self.is_periodic(),
            locality_bound: self.locality_bound,
            transitions,
        })
    }

    /// Execute one full pass over the sequence.
    pub fn run(&self, source: &mut OutcomeSource) -> Result<RunRecord> {
        let mut state = RunState::start(self);
        let mut groups = Vec::with_capacity(self.tau());
        groups.push(state.group.clone());
        let initial_logicals = state.logicals.clone();
        for pair in &self.pairs {
            state = step(state, pair, source)?;
            groups.push(state.group.clone());
        }
        Ok(RunRecord {
            outcomes: state.outcomes,
            groups,
            initial_logicals,
            final_logicals: state.logicals,
            k: self.isgs[0].k(),
        })
    }

    /// Execute one period and express the final logical representatives
    /// in the initial logical basis.
    pub fn period_action(&self, source: &mut OutcomeSource) -> Result<PeriodRun> {
        if !self.is_periodic() {
            return Err(Error::NotPeriodic(String::from(
                "first and last groups differ as unsigned groups",
            )));
        }
        let record = self.run(source)?;
        let final_group = record.groups.last().expect("non-empty").clone();
        let k = record.k;
        let flat = &record.initial_logicals;
        let mut columns: Vec<BitVec> = Vec::with_capacity(2 * k);
        let mut phases = Vec::with_capacity(2 * k);
        for f in &record.final_logicals {
            // Coefficient of X_i is read off against Z_i and vice versa.
            let mut coords = BitVec::zeros(2 * k);
            for i in 0..k {
                coords.set(i, f.sympl(&flat[k + i]) == 1);
                coords.set(k + i, f.sympl(&flat[i]) == 1);
            }
            let mut w = PauliOperator::identity(self.n());
            for i in coords.iter_ones() {
                w = w.mul(&flat[i]);
            }
            // Hermitian representative of the basis product: squares to
            // the identity, so f * w is exactly +-(group element).
            let w = w.unsigned();
            let d = f.mul(&w);
            let sign = final_group.contains(&d).ok_or_else(|| {
                Error::NotInQuotient(format!(
                    "image {} does not reduce to the canonical product {}",
                    f.to_text(),
                    w.to_text()
                ))
            })?;
            columns.push(coords);
            phases.push(sign);
        }
        // Column-major data gathered; store rows for the matrix type.
        let mut symplectic = BitMatrix::new(2 * k);
        for i in 0..2 * k {
            let mut row = BitVec::zeros(2 * k);
            for (j, col) in columns.iter().enumerate() {
                row.set(j, col.get(i));
            }
            symplectic.push(row);
        }
        let action = LogicalAction {
            k,
            symplectic,
            phases,
        };
        let frame = frame_correction(&self.isgs[0], &final_group, flat)?;
        Ok(PeriodRun {
            action,
            frame,
            record,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TransitionReport {
    pub index: usize,
    pub n_m: usize,
    pub max_diameter: Option<f64>,
    pub locality_pass: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SequenceReport {
    pub tau: usize,
    pub rank: usize,
    pub logical_qubits: usize,
    pub periodic: bool,
    pub locality_bound: Option<f64>,
    pub transitions: Vec<TransitionReport>,
}

impl SequenceReport {
    pub fn pass(&self) -> bool {
        self.transitions
            .iter()
            .all(|t| t.locality_pass != Some(false))
    }
}

/// Value-semantics snapshot of a run in progress.
#[derive(Clone, Debug)]
pub struct RunState {
    /// Number of transitions already executed.
    pub t: usize,
    /// Current signed stabiliser group.
    pub group: StabiliserGroup,
    /// All outcomes recorded so far.
    pub outcomes: Vec<Sign>,
    /// Current logical representatives in flat `[X.., Z..]` order.
    pub logicals: Vec<PauliOperator>,
}

impl RunState {
    pub fn start(seq: &FloquetSequence) -> RunState {
        RunState {
            t: 0,
            group: seq.isgs[0].clone(),
            outcomes: Vec::new(),
            logicals: seq.initial_logicals().flat(),
        }
    }
}

/// Rewrite a logical representative so it commutes with every measured
/// `b_i`, with the sign chosen against the *current signed group* so the
/// representative's expectation value is unchanged on any state the
/// group stabilises.
pub fn rewrite_logical(
    group: &StabiliserGroup,
    pair: &ConjugatePair,
    q: &PauliOperator,
) -> Result<PauliOperator> {
    let mut s = 0u64;
    for (i, b) in pair.basis_b().iter().enumerate() {
        if q.sympl(b) == 1 {
            s |= 1 << i;
        }
    }
    if s == 0 {
        return Ok(q.clone());
    }
    let a = pair.product_a(s);
    let sign = group.contains(&a).ok_or_else(|| {
        Error::GroupMismatch(format!(
            "rewrite element {} is not in the current group",
            a.to_text()
        ))
    })?;
    let out = a.mul(q);
    Ok(match sign {
        Sign::Plus => out,
        Sign::Minus => out.negated(),
    })
}

/// Execute one transition: rewrite the logicals, then measure each
/// `b_i` in order, threading outcomes from `source`.
pub fn step(
    mut state: RunState,
    pair: &ConjugatePair,
    source: &mut OutcomeSource,
) -> Result<RunState> {
    if !state.group.same_unsigned_span(pair.group_a()) {
        return Err(Error::GroupMismatch(format!(
            "run group at t = {} is not the source group of the transition",
            state.t
        )));
    }
    let mut logicals = Vec::with_capacity(state.logicals.len());
    for q in &state.logicals {
        logicals.push(rewrite_logical(&state.group, pair, q)?);
    }
    let mut group = state.group;
    for b in pair.basis_b() {
        let meas = group.measure(b, source)?;
        debug_assert_eq!(meas.kind, MeasureKind::Projected);
        state.outcomes.push(meas.outcome);
        group = meas.group;
    }
    Ok(RunState {
        t: state.t + 1,
        group,
        outcomes: state.outcomes,
        logicals,
    })
}

/// Full-pass record: everything needed to audit a run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub outcomes: Vec<Sign>,
    /// Signed group after 0, 1, .., tau-1 transitions.
    pub groups: Vec<StabiliserGroup>,
    pub initial_logicals: Vec<PauliOperator>,
    pub final_logicals: Vec<PauliOperator>,
    pub k: usize,
}

/// Logical action of one period on the k encoded qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalAction {
    pub k: usize,
    /// 2k x 2k GF(2) matrix in flat `[X.., Z..]` order; column j holds
    /// the coordinates of the image of basis element j.
    pub symplectic: BitMatrix,
    /// Sign of each image against the canonical basis product, measured
    /// on the final codespace.
    pub phases: Vec<Sign>,
}

impl LogicalAction {
    pub fn is_identity(&self) -> bool {
        let id = BitMatrix::identity(2 * self.k);
        self.symplectic.rows == id.rows && self.phases.iter().all(|s| *s == Sign::Plus)
    }

    /// The defining property of a Clifford action: commutation between
    /// logicals is preserved, i.e. M^T Omega M = Omega with
    /// Omega = [[0, I], [I, 0]] over GF(2).
    pub fn preserves_symplectic_form(&self) -> bool {
        let k = self.k;
        let m = &self.symplectic;
        for i in 0..2 * k {
            for j in 0..2 * k {
                // Omega(col_i, col_j) = sum_l col_i[l] col_j[l +- k]
                let mut form = false;
                for l in 0..k {
                    form ^= m.rows[l].get(i) & m.rows[l + k].get(j);
                    form ^= m.rows[l + k].get(i) & m.rows[l].get(j);
                }
                let expected = (i + k == j) || (j + k == i);
                if form != expected {
                    return false;
                }
            }
        }
        true
    }
}

/// One period's outputs: the logical action, the outcome-dependent
/// frame correction, and the raw run record.
#[derive(Clone, Debug)]
pub struct PeriodRun {
    pub action: LogicalAction,
    /// Pauli whose conjugation maps the final signed group back to the
    /// initial signs while commuting with every initial logical.
    pub frame: PauliOperator,
    pub record: RunRecord,
}

/// Solve for a Pauli that anticommutes with exactly the canonical
/// generators whose signs flipped between the two (unsigned-equal)
/// groups, and commutes with every supplied logical.
pub fn frame_correction(
    initial: &StabiliserGroup,
    final_group: &StabiliserGroup,
    logicals: &[PauliOperator],
) -> Result<PauliOperator> {
    if !initial.same_unsigned_span(final_group) {
        return Err(Error::GroupMismatch(String::from(
            "frame correction needs unsigned-equal groups",
        )));
    }
    let a = initial.canonicalise();
    let b = final_group.canonicalise();
    let n = initial.n();
    let mut rows = Vec::new();
    let mut rhs = BitVec::zeros(a.rank() + logicals.len());
    for (i, (ga, gb)) in a.generators().iter().zip(b.generators()).enumerate() {
        debug_assert_eq!(ga.x_bits(), gb.x_bits());
        debug_assert_eq!(ga.z_bits(), gb.z_bits());
        // Swapped halves turn the symplectic form into a plain dot product.
        let row = ga.z_bits().concat(ga.x_bits());
        rows.push(row);
        rhs.set(i, ga.phase() != gb.phase());
    }
    for q in logicals {
        rows.push(q.z_bits().concat(q.x_bits()));
    }
    let mat = BitMatrix::from_rows(2 * n, rows);
    let v = mat.solve(&rhs).ok_or_else(|| {
        Error::GroupMismatch(String::from(
            "no Pauli realises the required commutation pattern",
        ))
    })?;
    Ok(PauliOperator::from_sympl_row(&v, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliOperator as P;
    use alloc::vec;

    fn g(n: usize, gens: &[&str]) -> StabiliserGroup {
        StabiliserGroup::new(n, gens.iter().map(|s| P::parse(s).unwrap()).collect()).unwrap()
    }

    fn zxz() -> FloquetSequence {
        FloquetSequence::from_isgs(vec![g(1, &["+Z"]), g(1, &["+X"]), g(1, &["+Z"])]).unwrap()
    }

    #[test]
    fn simple_sequence_validates() {
        let seq = zxz();
        let rep = seq.validate().unwrap();
        assert_eq!(rep.tau, 3);
        assert!(rep.periodic);
        assert_eq!(rep.transitions.len(), 2);
        assert!(rep.transitions.iter().all(|t| t.n_m == 1));
        assert!(rep.pass());
    }

    #[test]
    fn non_reversible_adjacency_is_rejected() {
        let err =
            FloquetSequence::from_isgs(vec![g(2, &["+ZZ"]), g(2, &["+XX"])]).unwrap_err();
        assert!(matches!(err, Error::InvalidGroup(ref m) if m.contains("not reversible")));
    }

    #[test]
    fn step_threads_outcome_signs_into_the_group() {
        let seq = zxz();
        let state = RunState::start(&seq);
        let mut plus = OutcomeSource::forced(vec![Sign::Plus]);
        let after = step(state.clone(), &seq.pairs()[0], &mut plus).unwrap();
        assert_eq!(after.group.contains(&P::parse("+X").unwrap()), Some(Sign::Plus));

        let mut minus = OutcomeSource::forced(vec![Sign::Minus]);
        let after = step(state, &seq.pairs()[0], &mut minus).unwrap();
        assert_eq!(after.group.contains(&P::parse("-X").unwrap()), Some(Sign::Plus));
        assert_eq!(after.outcomes, vec![Sign::Minus]);
    }

    #[test]
    fn forced_sweeps_reach_every_sign_vector() {
        let a = g(2, &["+ZI", "+IZ"]);
        let b = g(2, &["+XX", "+IX"]);
        let seq = FloquetSequence::from_isgs(vec![a, b]).unwrap();
        let mut seen = alloc::collections::BTreeSet::new();
        for mask in 0..4u64 {
            let mut src = OutcomeSource::forced_from_mask(mask, 2);
            let state = step(RunState::start(&seq), &seq.pairs()[0], &mut src).unwrap();
            assert!(state.group.same_unsigned_span(&seq.isgs()[1]));
            let signs: Vec<u8> = state
                .group
                .canonicalise()
                .generators()
                .iter()
                .map(|p| p.phase() / 2)
                .collect();
            seen.insert(signs);
        }
        assert_eq!(seen.len(), 4, "all four sign vectors must be distinct");
    }

    #[test]
    fn rewrite_keeps_commuting_logicals_untouched() {
        let seq = FloquetSequence::from_isgs(vec![g(2, &["+ZI"]), g(2, &["+XI"])]).unwrap();
        let q = P::parse("+XX").unwrap();
        let out = rewrite_logical(&seq.isgs()[0], &seq.pairs()[0], &q).unwrap();
        assert_eq!(out, q);
    }

    #[test]
    fn rewrite_multiplies_in_the_conjugate_partner() {
        let seq = FloquetSequence::from_isgs(vec![g(2, &["+ZI"]), g(2, &["+XI"])]).unwrap();
        let q = P::parse("+ZZ").unwrap(); // anticommutes with XI
        let out = rewrite_logical(&seq.isgs()[0], &seq.pairs()[0], &q).unwrap();
        assert_eq!(out, P::parse("+IZ").unwrap());
        // Class invariance: out * q must sit in the group.
        let ratio = out.mul(&q);
        assert!(seq.isgs()[0].contains(&ratio).is_some());
    }

    #[test]
    fn rewrite_respects_run_group_signs() {
        // Same quotient, but the run group has a flipped sign; the
        // rewritten representative must absorb it.
        let seq = FloquetSequence::from_isgs(vec![g(2, &["+ZI"]), g(2, &["+XI"])]).unwrap();
        let flipped = g(2, &["-ZI"]);
        let q = P::parse("+ZZ").unwrap();
        let out = rewrite_logical(&flipped, &seq.pairs()[0], &q).unwrap();
        assert_eq!(out, P::parse("-IZ").unwrap());
    }

    #[test]
    fn logicals_commute_with_group_after_every_step() {
        let seq = FloquetSequence::from_isgs(vec![
            g(2, &["+ZZ"]),
            g(2, &["+XZ"]),
            g(2, &["+YZ"]),
            g(2, &["+ZZ"]),
        ])
        .unwrap();
        for mask in 0..8u64 {
            let mut src = OutcomeSource::forced_from_mask(mask, 3);
            let mut state = RunState::start(&seq);
            for pair in seq.pairs() {
                state = step(state, pair, &mut src).unwrap();
                for q in &state.logicals {
                    for gen in state.group.generators() {
                        assert_eq!(q.sympl(gen), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn disjoint_logical_qubit_sees_identity_action() {
        let seq = FloquetSequence::from_isgs(vec![
            g(2, &["+ZI"]),
            g(2, &["+XI"]),
            g(2, &["+ZI"]),
        ])
        .unwrap();
        for mask in 0..4u64 {
            let mut src = OutcomeSource::forced_from_mask(mask, 2);
            let run = seq.period_action(&mut src).unwrap();
            assert!(run.action.is_identity(), "mask {mask}");
            assert!(run.action.preserves_symplectic_form());
        }
    }

    #[test]
    fn trivial_period_has_identity_action() {
        let a = g(2, &["+ZI", "+IZ"]);
        let seq = FloquetSequence::from_isgs(vec![a.clone(), a]).unwrap();
        assert_eq!(seq.pairs()[0].n_m(), 0);
        let mut src = OutcomeSource::seeded(1);
        let run = seq.period_action(&mut src).unwrap();
        assert!(run.action.is_identity());
    }

    #[test]
    fn period_action_is_outcome_independent() {
        let seq = FloquetSequence::from_isgs(vec![
            g(2, &["+ZZ"]),
            g(2, &["+XZ"]),
            g(2, &["+YZ"]),
            g(2, &["+ZZ"]),
        ])
        .unwrap();
        let mut actions = Vec::new();
        for mask in 0..8u64 {
            let mut src = OutcomeSource::forced_from_mask(mask, 3);
            let run = seq.period_action(&mut src).unwrap();
            assert!(run.action.preserves_symplectic_form(), "mask {mask}");
            actions.push(run.action.symplectic.rows.clone());
        }
        for a in &actions[1..] {
            assert_eq!(*a, actions[0], "symplectic part must not depend on outcomes");
        }
    }

    #[test]
    fn three_basis_cycle_acts_nontrivially() {
        let seq = FloquetSequence::from_isgs(vec![
            g(2, &["+ZZ"]),
            g(2, &["+XZ"]),
            g(2, &["+YZ"]),
            g(2, &["+ZZ"]),
        ])
        .unwrap();
        let mut src = OutcomeSource::forced_from_mask(0, 3);
        let run = seq.period_action(&mut src).unwrap();
        let id = BitMatrix::identity(2);
        assert_ne!(run.action.symplectic.rows, id.rows);
    }

    #[test]
    fn non_periodic_sequence_is_refused() {
        let seq = FloquetSequence::from_isgs(vec![g(1, &["+Z"]), g(1, &["+X"])]).unwrap();
        let mut src = OutcomeSource::seeded(0);
        assert!(matches!(
            seq.period_action(&mut src),
            Err(Error::NotPeriodic(_))
        ));
    }

    #[test]
    fn frame_correction_restores_initial_signs() {
        let seq = zxz();
        // Drive the run to a frame with flipped signs.
        for mask in 0..4u64 {
            let mut src = OutcomeSource::forced_from_mask(mask, 2);
            let run = seq.period_action(&mut src).unwrap();
            let final_group = run.record.groups.last().unwrap();
            let frame = &run.frame;
            let init = seq.isgs()[0].canonicalise();
            for (ga, gf) in init
                .generators()
                .iter()
                .zip(final_group.canonicalise().generators())
            {
                let flipped = ga.phase() != gf.phase();
                assert_eq!(
                    frame.sympl(ga) == 1,
                    flipped,
                    "frame must anticommute exactly with flipped generators"
                );
            }
            for q in &run.record.initial_logicals {
                assert_eq!(frame.sympl(q), 0, "frame must not touch logicals");
            }
        }
    }

    #[test]
    fn run_exhausts_forced_streams_cleanly() {
        let seq = zxz();
        let mut short = OutcomeSource::forced(vec![Sign::Plus]);
        let err = seq.run(&mut short).unwrap_err();
        assert!(matches!(err, Error::OutcomesExhausted));
    }

    #[test]
    fn with_pairs_rejects_mismatched_boundaries() {
        let p1 = match check_reversible(&g(1, &["+Z"]), &g(1, &["+X"])).unwrap() {
            Reversibility::Reversible(p) => p,
            _ => unreachable!(),
        };
        let p2 = match check_reversible(&g(1, &["-X"]), &g(1, &["+Z"])).unwrap() {
            Reversibility::Reversible(p) => p,
            _ => unreachable!(),
        };
        let err = FloquetSequence::with_pairs(vec![p1.clone(), p2]).unwrap_err();
        assert!(matches!(err, Error::GroupMismatch(_)));
        // Matching boundary works.
        let p3 = match check_reversible(&g(1, &["+X"]), &g(1, &["+Z"])).unwrap() {
            Reversibility::Reversible(p) => p,
            _ => unreachable!(),
        };
        let seq = FloquetSequence::with_pairs(vec![p1, p3]).unwrap();
        assert_eq!(seq.tau(), 3);
        assert!(seq.is_periodic());
    }
}
