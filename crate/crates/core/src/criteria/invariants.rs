//! Randomized suite for the relations among the criteria.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{cross_validate, criterion2_fixed_state, diamond_commutation_oracle, GapProtocol};
use crate::matcore::Tolerances;
use crate::quantum::{
    sample_commuting_povm_pair, sample_compatible_sharp_pair, sample_povm, sample_pvm, DensityOperator, Povm,
};
use crate::seqprod::{run_suite, PhaseFamily, SuiteReport};
use crate::rng::StreamRng;
use crate::Result;

/// How a random `(X, Y)` pair is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    /// Both POVMs diagonal in one random basis.
    Commuting,
    /// Commuting, with `Y` a PVM.
    CommutingSharp,
    /// Independent random POVMs.
    Generic,
    /// Random POVM `X`, independent random PVM `Y`.
    GenericSharp,
}

impl PairKind {
    pub const ALL: [PairKind; 4] = [Self::Commuting, Self::CommutingSharp, Self::Generic, Self::GenericSharp];

    pub fn is_commuting(self) -> bool {
        matches!(self, Self::Commuting | Self::CommutingSharp)
    }
}

/// Draws a pair of the given kind with 1–3 outcomes per POVM (PVMs have at
/// most `dim` parts).
pub fn sample_pair(kind: PairKind, dim: usize, rng: &mut StreamRng) -> (Povm, Povm) {
    let m = rng.random_range(1..=3);
    let n = rng.random_range(2..=3);
    let parts = rng.random_range(1..=dim.min(3));
    match kind {
        PairKind::Commuting => sample_commuting_povm_pair(dim, m, n, rng),
        PairKind::CommutingSharp => sample_compatible_sharp_pair(dim, m, parts, rng),
        PairKind::Generic => (sample_povm(dim, m, rng), sample_povm(dim, n, rng)),
        PairKind::GenericSharp => (sample_povm(dim, m, rng), sample_pvm(dim, parts, rng)),
    }
}

pub const CRITERIA_PROPERTIES: [(&str, f64); 5] = [
    ("implication lattice violations", 0.5),
    ("compatible implies (II)", 1e-9),
    ("(II) at maximally mixed state", 1e-10),
    ("diamond commutation implications", 0.5),
    ("vacuous (I) pairs", 0.5),
];

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn criteria_trial(fam: &PhaseFamily, dim: usize, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let kind = PairKind::ALL[rng.random_range(0..4)];
    let (x, y) = sample_pair(kind, dim, rng);
    let tol = Tolerances::default();
    let gap = GapProtocol::default();
    let mixed = DensityOperator::maximally_mixed(dim);
    let report = cross_validate(fam, &x, &y, Some(&mixed), &tol, &gap)?;
    let compat_implies_ii = if gap.classify(report.compatibility_residual) == super::GapClass::Zero {
        report.criterion2.normalized_residual()
    } else {
        0.0
    };
    let at_mixed = criterion2_fixed_state(fam, &x, &y, &mixed, 0.0)?.max_residual;
    let mut broken = false;
    for a in x.elements() {
        for b in y.elements() {
            broken |= !diamond_commutation_oracle(fam, a, b, &gap)?.implications_hold;
        }
    }
    Ok(vec![
        indicator(!report.consistent()),
        compat_implies_ii,
        at_mixed,
        indicator(broken),
        indicator(!report.criterion1.vacuous.is_empty()),
    ])
}

/// Checks, on `trials` random pairs of mixed kinds, that the criteria agree
/// with their characterizations, that compatible pairs satisfy (II), that
/// (II) always holds at `I/d`, and that the diamond commutation implications
/// hold element-wise.
pub fn verify_criteria(fam: &PhaseFamily, dim: usize, trials: u64, seed: u64) -> SuiteReport {
    run_suite("criteria", fam, dim, trials, seed, &CRITERIA_PROPERTIES, |rng| {
        criteria_trial(fam, dim, rng)
    })
}
