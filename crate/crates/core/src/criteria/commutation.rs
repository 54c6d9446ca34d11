//! Relations between commutation and the sequential product.

use serde::{Deserialize, Serialize};

use super::GapProtocol;
use crate::matcore::{is_normal, ComplexMatrix, Tolerances};
use crate::quantum::EffectOperator;
use crate::seqprod::{phase_apply, sequential_product_matrix, PhaseFamily};
use crate::{Error, Result};

/// The four predicates relating `⋄` to commutation, with their normalized
/// residuals in the order
/// `[AB = BA, A⋄B = B⋄A, A⋄B = AB, A⋄B = f̄_B(B) A f_B(B)]`.
///
/// Expected relations: the first implies the other three, and the second and
/// fourth each imply the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamondCommutation {
    pub commute: bool,
    pub diamond_commute: bool,
    pub diamond_is_product: bool,
    pub diamond_is_reverse_channel: bool,
    pub residuals: [f64; 4],
    pub implications_hold: bool,
}

pub fn diamond_commutation_oracle(
    fam: &PhaseFamily,
    a: &EffectOperator,
    b: &EffectOperator,
    gap: &GapProtocol,
) -> Result<DiamondCommutation> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let scale = Tolerances::scaled(1.0, a.dim(), &[a.matrix().frobenius_norm(), b.matrix().frobenius_norm()]);
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    let a_d_b = sequential_product_matrix(fam, a, b.matrix())?;
    let b_d_a = sequential_product_matrix(fam, b, a.matrix())?;
    let reverse = phase_apply(fam, b).adjoint().sandwich(a.matrix());
    let residuals = [
        ab.distance_unchecked(&ba) / scale,
        a_d_b.distance_unchecked(&b_d_a) / scale,
        a_d_b.distance_unchecked(&ab) / scale,
        a_d_b.distance_unchecked(&reverse) / scale,
    ];
    let [commute, diamond_commute, product, rev] = residuals;
    let violated = gap.implication_violated(commute, diamond_commute)
        || gap.implication_violated(commute, product)
        || gap.implication_violated(commute, rev)
        || gap.implication_violated(diamond_commute, commute)
        || gap.implication_violated(rev, commute);
    Ok(DiamondCommutation {
        commute: commute <= gap.check,
        diamond_commute: diamond_commute <= gap.check,
        diamond_is_product: product <= gap.check,
        diamond_is_reverse_channel: rev <= gap.check,
        residuals,
        implications_hold: !violated,
    })
}

/// Hypothesis `AB = BAB` and conclusion `AB = BA` for a normal `A` and an
/// effect `B`. Residuals are raw Frobenius norms: the hypothesis holds at
/// `gap.check`, the conclusion fails beyond `gap.classify`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalCommutationOutcome {
    pub hypothesis_residual: f64,
    pub conclusion_residual: f64,
    pub hypothesis: bool,
    pub conclusion: bool,
    /// Hypothesis holds while the conclusion clearly fails.
    pub violated: bool,
}

pub fn normal_commutation_check(a: &ComplexMatrix, b: &EffectOperator, gap: &GapProtocol) -> Result<NormalCommutationOutcome> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let tol = Tolerances::default();
    if !is_normal(a, &tol) {
        let h = a.adjoint();
        return Err(Error::NotNormal {
            residual: (a * &h).distance_unchecked(&(&h * a)),
        });
    }
    Ok(normal_commutation_residuals(a, b.matrix(), gap))
}

pub(crate) fn normal_commutation_residuals(a: &ComplexMatrix, b: &ComplexMatrix, gap: &GapProtocol) -> NormalCommutationOutcome {
    let ab = a * b;
    let bab = b * &ab;
    let ba = b * a;
    let hypothesis_residual = ab.distance_unchecked(&bab);
    let conclusion_residual = ab.distance_unchecked(&ba);
    NormalCommutationOutcome {
        hypothesis_residual,
        conclusion_residual,
        hypothesis: hypothesis_residual <= gap.check,
        conclusion: conclusion_residual <= gap.classify,
        violated: gap.implication_violated(hypothesis_residual, conclusion_residual),
    }
}
