//! All three criteria and their oracles evaluated on one instance, with the
//! expected implications checked under a [`GapProtocol`].

use serde::{Deserialize, Serialize};

use super::{
    compatibility_residual, criterion1_check, criterion1_oracle_residual, criterion2_check, criterion2_fixed_state,
    criterion3_check, CriterionReport, GapProtocol,
};
use crate::matcore::Tolerances;
use crate::quantum::{DensityOperator, Povm};
use crate::seqprod::PhaseFamily;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    pub family: PhaseFamily,
    pub criterion1: CriterionReport,
    pub criterion2: CriterionReport,
    pub criterion3: CriterionReport,
    /// Criterion (II) at the supplied state, when one was given.
    pub criterion2_at_state: Option<CriterionReport>,
    pub compatibility_residual: f64,
    pub compatible: bool,
    /// `max λ min(λ, 1 − λ)` for each `B_j`.
    pub y_sharpness: Vec<f64>,
    pub y_sharp: bool,
    pub oracle_residual: f64,
    pub oracle: bool,
    /// Human-readable descriptions of each expected relation that failed.
    pub violations: Vec<String>,
    pub tolerances: Tolerances,
    pub gap: GapProtocol,
}

impl CrossReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs criteria (I)–(III) at `tol` and checks
/// (III) ⇔ compatible, (I) ⇔ compatible ∧ `Y` sharp, compatible ⇒ (II), and
/// compatible ⇒ (II) at `w`.
pub fn cross_validate(
    fam: &PhaseFamily,
    x: &Povm,
    y: &Povm,
    w: Option<&DensityOperator>,
    tol: &Tolerances,
    gap: &GapProtocol,
) -> Result<CrossReport> {
    let base = tol.mat_eq;
    let c1 = criterion1_check(fam, x, y, base)?;
    let c2 = criterion2_check(fam, x, y, base)?;
    let c3 = criterion3_check(fam, x, y, base)?;
    let at_state = w.map(|w| criterion2_fixed_state(fam, x, y, w, base)).transpose()?;
    let compat = compatibility_residual(x, y)?;
    let oracle_residual = criterion1_oracle_residual(x, y)?;
    let y_sharpness: Vec<f64> = y.elements().iter().map(|e| e.sharpness_residual()).collect();

    let mut violations = Vec::new();
    let r1 = c1.normalized_residual();
    let r2 = c2.normalized_residual();
    let r3 = c3.normalized_residual();
    if gap.equivalence_violated(r3, compat) {
        violations.push(format!("order independence {r3:e} disagrees with compatibility {compat:e}"));
    }
    if gap.equivalence_violated(r1, oracle_residual) {
        violations.push(format!(
            "repeatability {r1:e} disagrees with compatible-and-sharp {oracle_residual:e}"
        ));
    }
    if gap.implication_violated(compat, r2) {
        violations.push(format!("compatible pair disturbs Y statistics: {r2:e}"));
    }
    if let Some(s) = &at_state {
        if gap.implication_violated(compat, s.max_residual) {
            violations.push(format!("compatible pair disturbs Y at the given state: {:e}", s.max_residual));
        }
    }

    Ok(CrossReport {
        family: *fam,
        compatible: compat <= base,
        y_sharp: c1.y_sharp,
        oracle: oracle_residual <= base,
        criterion1: c1,
        criterion2: c2,
        criterion3: c3,
        criterion2_at_state: at_state,
        compatibility_residual: compat,
        y_sharpness,
        oracle_residual,
        violations,
        tolerances: *tol,
        gap: *gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{binary_povm, qubit_pq, random_commuting_povm_pair, random_compatible_sharp_pair};

    #[test]
    fn incompatible_qubit_pair() {
        let tol = Tolerances::default();
        let (p, q) = qubit_pq();
        let x = binary_povm(&p, &tol).unwrap();
        let y = binary_povm(&q, &tol).unwrap();
        let r = cross_validate(&PhaseFamily::default(), &x, &y, None, &tol, &GapProtocol::default()).unwrap();
        assert!(!r.criterion1.verdict && !r.criterion2.verdict && !r.criterion3.verdict);
        assert!(!r.compatible && r.y_sharp && !r.oracle);
        assert!(r.consistent(), "{:?}", r.violations);
    }

    #[test]
    fn compatible_pairs() {
        let tol = Tolerances::default();
        let fam = PhaseFamily::new(1.3, 0.2);
        let (x, y) = random_compatible_sharp_pair(3, 3, 2, 9).unwrap();
        let w = DensityOperator::maximally_mixed(3);
        let r = cross_validate(&fam, &x, &y, Some(&w), &tol, &GapProtocol::default()).unwrap();
        assert!(r.criterion1.verdict && r.criterion2.verdict && r.criterion3.verdict && r.oracle);
        assert!(r.criterion2_at_state.as_ref().unwrap().verdict);
        assert!(r.consistent());

        let (x, y) = random_commuting_povm_pair(3, 2, 3, 10).unwrap();
        let r = cross_validate(&fam, &x, &y, None, &tol, &GapProtocol::default()).unwrap();
        assert!(r.compatible && r.criterion2.verdict && r.criterion3.verdict);
        assert!(r.consistent());
    }
}
