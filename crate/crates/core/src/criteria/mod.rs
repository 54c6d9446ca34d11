//! Non-disturbance criteria for a pair of POVMs `X = {A_k}`, `Y = {B_j}`.
//!
//! * (I) an established `Y` value survives a later `X` measurement:
//!   `p_W(B_j | B_j ⋄ A_k) = 1`;
//! * (II) a preceding non-selective `X` leaves `Y` statistics unchanged:
//!   `p_W(B_j) = Σ_k p_W(A_k ⋄ B_j)`;
//! * (III) order does not matter: `p_W(A_k ⋄ B_j) = p_W(B_j ⋄ A_k)`.
//!
//! Each criterion quantifies over all states `W`. Trace functionals separate
//! operators, so every check here is the equivalent operator identity:
//!
//! * (I)   `B_j ⋄ (A_k ⋄ B_j) = B_j ⋄ A_k`
//! * (II)  `Σ_k A_k ⋄ B_j = B_j`
//! * (III) `A_k ⋄ B_j = B_j ⋄ A_k`
//!
//! Residuals are Frobenius norms. A report's `threshold` is its base `tol`
//! multiplied by `scale = dim · max(1, ‖A_k‖_F, ‖B_j‖_F)`.

mod cross;
mod invariants;
mod commutation;
mod search;

pub use cross::{cross_validate, CrossReport};
pub use invariants::{sample_pair, verify_criteria, PairKind, CRITERIA_PROPERTIES};
pub use commutation::{diamond_commutation_oracle, normal_commutation_check, DiamondCommutation, NormalCommutationOutcome};
pub use search::{
    replay_pair, search_criterion2_gap, search_normal_commutation, AllStateFinding, Criterion2GapFindings, FixedStateFinding,
    NormalCommutationSearchReport, NormalCommutationWitness,
};

use serde::{Deserialize, Serialize};

use crate::quantum::{max_commutator, DensityOperator, Povm};
use crate::seqprod::{heisenberg_image_matrix, sequential_product_matrix, PhaseFamily};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    I,
    II,
    III,
}

/// A failing pair. `k` is absent for criterion (II), which is indexed by `j`
/// alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: Option<usize>,
    pub j: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub verdict: bool,
    pub max_residual: f64,
    /// Base tolerance before scaling.
    pub tol: f64,
    pub scale: f64,
    /// `tol · scale`; `verdict ⇔ max_residual ≤ threshold`.
    pub threshold: f64,
    /// Residuals indexed `[k][j]`; a single row indexed `[j]` for (II).
    pub per_pair: Vec<Vec<f64>>,
    pub compatible: bool,
    pub y_sharp: bool,
    pub witnesses: Vec<Witness>,
    /// Criterion (I) pairs whose conditioning effect `B_j ⋄ A_k` vanishes, so
    /// no state gives a defined conditional; counted as satisfied.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vacuous: Vec<(usize, usize)>,
}

impl CriterionReport {
    /// `max_residual / scale`, comparable against an unscaled tolerance.
    pub fn normalized_residual(&self) -> f64 {
        self.max_residual / self.scale
    }
}

/// Hysteresis between a criterion and the oracle it is compared with.
///
/// A normalized residual `r` is *zero* when `r ≤ check`, *non-zero* when
/// `r > classify`, and ambiguous in between. An equivalence is violated only
/// when one side is clearly zero and the other clearly non-zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapProtocol {
    pub check: f64,
    pub classify: f64,
}

impl Default for GapProtocol {
    fn default() -> Self {
        Self {
            check: 1e-8,
            classify: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapClass {
    Zero,
    Ambiguous,
    NonZero,
}

impl GapProtocol {
    pub fn classify(&self, r: f64) -> GapClass {
        if r <= self.check {
            GapClass::Zero
        } else if r > self.classify {
            GapClass::NonZero
        } else {
            GapClass::Ambiguous
        }
    }

    /// `premise ⇒ conclusion` is violated.
    pub fn implication_violated(&self, premise: f64, conclusion: f64) -> bool {
        premise <= self.check && conclusion > self.classify
    }

    /// `lhs = 0 ⇔ rhs = 0` is violated.
    pub fn equivalence_violated(&self, lhs: f64, rhs: f64) -> bool {
        self.implication_violated(lhs, rhs) || self.implication_violated(rhs, lhs)
    }
}

fn check_pair(x: &Povm, y: &Povm) -> Result<usize> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(x.dim())
}

/// `dim · max(1, ‖A_k‖_F, ‖B_j‖_F)`.
pub fn pair_scale(x: &Povm, y: &Povm) -> f64 {
    let norm = x
        .elements()
        .iter()
        .chain(y.elements())
        .map(|e| e.matrix().frobenius_norm())
        .fold(1.0_f64, f64::max);
    x.dim() as f64 * norm
}

/// `max_{k,j} ‖[A_k, B_j]‖_F / scale`.
pub fn compatibility_residual(x: &Povm, y: &Povm) -> Result<f64> {
    check_pair(x, y)?;
    Ok(max_commutator(x, y)? / pair_scale(x, y))
}

/// `max_j max_λ min(λ, 1 − λ) / dim` over the spectra of `Y`.
pub fn sharpness_residual(y: &Povm) -> f64 {
    y.elements()
        .iter()
        .map(|e| e.sharpness_residual())
        .fold(0.0, f64::max)
        / y.dim() as f64
}

/// Residual of the right-hand side of the criterion (I) characterization:
/// zero iff `X` and `Y` are compatible and every `B_j` is a projection.
pub fn criterion1_oracle_residual(x: &Povm, y: &Povm) -> Result<f64> {
    Ok(compatibility_residual(x, y)?.max(sharpness_residual(y)))
}

/// `X` and `Y` are compatible and `Y` is sharp, judged at `tol`. No phase
/// family is involved.
pub fn criterion1_oracle(x: &Povm, y: &Povm, tol: f64) -> Result<bool> {
    Ok(criterion1_oracle_residual(x, y)? <= tol)
}

struct Grid {
    per_pair: Vec<Vec<f64>>,
    witnesses: Vec<Witness>,
    max_residual: f64,
}

fn collect_grid(per_pair: Vec<Vec<f64>>, threshold: f64, indexed_by_k: bool) -> Grid {
    let mut witnesses = Vec::new();
    let mut max_residual = 0.0_f64;
    for (k, row) in per_pair.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            max_residual = max_residual.max(r);
            if r > threshold || r.is_nan() {
                witnesses.push(Witness {
                    k: indexed_by_k.then_some(k),
                    j,
                    residual: r,
                });
            }
        }
    }
    Grid {
        per_pair,
        witnesses,
        max_residual,
    }
}

fn report(criterion: Criterion, grid: Grid, tol: f64, scale: f64, x: &Povm, y: &Povm) -> Result<CriterionReport> {
    let threshold = tol * scale;
    Ok(CriterionReport {
        criterion,
        verdict: grid.max_residual <= threshold,
        max_residual: grid.max_residual,
        tol,
        scale,
        threshold,
        per_pair: grid.per_pair,
        compatible: compatibility_residual(x, y)? <= tol,
        y_sharp: sharpness_residual(y) <= tol,
        witnesses: grid.witnesses,
        vacuous: Vec::new(),
    })
}

/// Criterion (I): residuals `‖B_j ⋄ (A_k ⋄ B_j) − B_j ⋄ A_k‖_F`.
pub fn criterion1_check(fam: &PhaseFamily, x: &Povm, y: &Povm, tol: f64) -> Result<CriterionReport> {
    check_pair(x, y)?;
    let scale = pair_scale(x, y);
    let mut vacuous = Vec::new();
    let mut per_pair = Vec::with_capacity(x.len());
    for (k, a) in x.elements().iter().enumerate() {
        let mut row = Vec::with_capacity(y.len());
        for (j, b) in y.elements().iter().enumerate() {
            let denominator = sequential_product_matrix(fam, b, a.matrix())?;
            let inner = sequential_product_matrix(fam, a, b.matrix())?;
            let numerator = sequential_product_matrix(fam, b, &inner)?;
            if denominator.frobenius_norm() <= tol * scale {
                vacuous.push((k, j));
            }
            row.push(numerator.distance_unchecked(&denominator));
        }
        per_pair.push(row);
    }
    let grid = collect_grid(per_pair, tol * scale, true);
    let mut r = report(Criterion::I, grid, tol, scale, x, y)?;
    r.vacuous = vacuous;
    Ok(r)
}

/// Criterion (II): residuals `‖Σ_k A_k ⋄ B_j − B_j‖_F`.
pub fn criterion2_check(fam: &PhaseFamily, x: &Povm, y: &Povm, tol: f64) -> Result<CriterionReport> {
    check_pair(x, y)?;
    let scale = pair_scale(x, y);
    let row = y
        .elements()
        .iter()
        .map(|b| Ok(heisenberg_image_matrix(fam, x, b.matrix())?.distance_unchecked(b.matrix())))
        .collect::<Result<Vec<f64>>>()?;
    let grid = collect_grid(vec![row], tol * scale, false);
    report(Criterion::II, grid, tol, scale, x, y)
}

/// Criterion (II) at one state: residuals
/// `|tr(B_j W) − Σ_k tr((A_k ⋄ B_j) W)|`, compared against `tol` unscaled.
pub fn criterion2_fixed_state(
    fam: &PhaseFamily,
    x: &Povm,
    y: &Povm,
    w: &DensityOperator,
    tol: f64,
) -> Result<CriterionReport> {
    check_pair(x, y)?;
    if w.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: w.dim(),
        });
    }
    let row = y
        .elements()
        .iter()
        .map(|b| {
            let before = b.matrix().trace_product(w.matrix()).re;
            let after: f64 = x
                .elements()
                .iter()
                .map(|a| Ok(sequential_product_matrix(fam, a, b.matrix())?.trace_product(w.matrix()).re))
                .sum::<Result<f64>>()?;
            Ok((before - after).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let grid = collect_grid(vec![row], tol, false);
    report(Criterion::II, grid, tol, 1.0, x, y)
}

/// Criterion (III): residuals `‖A_k ⋄ B_j − B_j ⋄ A_k‖_F`.
pub fn criterion3_check(fam: &PhaseFamily, x: &Povm, y: &Povm, tol: f64) -> Result<CriterionReport> {
    check_pair(x, y)?;
    let scale = pair_scale(x, y);
    let per_pair = x
        .elements()
        .iter()
        .map(|a| {
            y.elements()
                .iter()
                .map(|b| {
                    let ab = sequential_product_matrix(fam, a, b.matrix())?;
                    let ba = sequential_product_matrix(fam, b, a.matrix())?;
                    Ok(ab.distance_unchecked(&ba))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let grid = collect_grid(per_pair, tol * scale, true);
    report(Criterion::III, grid, tol, scale, x, y)
}
