//! Randomized searches: falsification of the normal-operator commutation
//! property, and evidence gathering around the converse of criterion (II).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::commutation::normal_commutation_residuals;
use super::{compatibility_residual, criterion2_check, criterion2_fixed_state, GapProtocol};
use crate::matcore::{hermitian_eigendecomposition, ComplexMatrix, Tolerances};
use crate::quantum::{
    in_basis, sample_density, sample_effect, sample_gaussian, sample_povm, sample_unitary, validate_povm,
    DensityOperator, Povm,
};
use crate::rng::{substream, StreamRng};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalCommutationWitness {
    pub seed: u64,
    pub index: u64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub hypothesis_residual: f64,
    pub conclusion_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalCommutationSearchReport {
    pub attempts: u64,
    pub seed: u64,
    /// Attempts whose final pair satisfies the hypothesis at `gap.check`.
    pub hypothesis_hits: u64,
    pub min_hypothesis_residual: f64,
    pub violations: Vec<NormalCommutationWitness>,
}

/// Frobenius projection of a Hermitian matrix onto the effects: clamp the
/// spectrum into `[0, 1]`.
fn project_to_effect(m: &ComplexMatrix) -> ComplexMatrix {
    let tol = Tolerances::default();
    hermitian_eigendecomposition(&m.hermitian_part(), &tol)
        .map(|s| s.map(|t| Complex64::new(t.clamp(0.0, 1.0), 0.0)))
        .unwrap_or_else(|_| m.clone())
}

fn small_hermitian(dim: usize, scale: f64, rng: &mut StreamRng) -> ComplexMatrix {
    sample_gaussian(dim, rng).hermitian_part().scale(scale)
}

/// `‖AB − BAB‖_F²` and its gradient in `B` over Hermitian matrices.
fn objective(a: &ComplexMatrix, b: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let ab = a * b;
    let r = &ab - &(b * &ab);
    let rh = r.adjoint();
    let k = &(&(&rh * a) - &(&ab * &rh)) - &(&(&rh * b) * a);
    let f = r.frobenius_norm().powi(2);
    (f, &k + &k.adjoint())
}

/// Projected gradient descent on `‖AB − BAB‖²` with step halving.
fn descend(a: &ComplexMatrix, mut b: ComplexMatrix, steps: usize) -> ComplexMatrix {
    let norm = a.frobenius_norm();
    let mut eta = 0.5 / (1.0 + norm * norm);
    let (mut f, mut g) = objective(a, &b);
    for _ in 0..steps {
        let mut accepted = false;
        for _ in 0..6 {
            let trial = project_to_effect(&(&b - &g.scale(eta)));
            let (ft, gt) = objective(a, &trial);
            if ft < f {
                b = trial;
                f = ft;
                g = gt;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    b
}

fn normal_commutation_attempt(dim: usize, rng: &mut StreamRng) -> (ComplexMatrix, ComplexMatrix) {
    let u = sample_unitary(dim, rng);
    let z: Vec<Complex64> = (0..dim)
        .map(|_| {
            if rng.random::<f64>() < 0.3 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }
        })
        .collect();
    let a = u.sandwich(&ComplexMatrix::from_diagonal(&z).expect("finite"));
    // Exact solutions of AB = BAB: B commutes with A and is a projection off
    // ker A, arbitrary on it.
    let surface: Vec<f64> = z
        .iter()
        .map(|v| {
            if v.norm() == 0.0 {
                rng.random()
            } else if rng.random::<bool>() {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let b = match rng.random_range(0..4) {
        0 => descend(&a, sample_effect(dim, rng).matrix().clone(), 25),
        1 => in_basis(&u, &surface),
        _ => {
            let eps = [1e-3, 1e-6, 1e-9][rng.random_range(0..3)];
            let start = project_to_effect(&(&in_basis(&u, &surface) + &small_hermitian(dim, eps, rng)));
            descend(&a, start, 10)
        }
    };
    (a, b)
}

/// Searches for a normal `A` and an effect `B` with `AB ≈ BAB` but
/// `AB ≉ BA`. Attempts mix generic effects driven toward the hypothesis
/// surface by projected descent, exact surface points, and perturbed surface
/// points. Dimensions cycle through `dims`.
pub fn search_normal_commutation(trials: u64, seed: u64, dims: &[usize], gap: &GapProtocol) -> Result<NormalCommutationSearchReport> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0 || d > crate::matcore::MAX_DIM) {
        return Err(Error::InvalidParameter("dims must be non-empty and in range".into()));
    }
    let results: Vec<(u64, f64, Option<NormalCommutationWitness>)> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let mut rng = substream(seed, index);
            let dim = dims[(index % dims.len() as u64) as usize];
            let (a, b) = normal_commutation_attempt(dim, &mut rng);
            let o = normal_commutation_residuals(&a, &b, gap);
            let witness = o.violated.then(|| NormalCommutationWitness {
                seed,
                index,
                a: a.clone(),
                b: b.clone(),
                hypothesis_residual: o.hypothesis_residual,
                conclusion_residual: o.conclusion_residual,
            });
            (u64::from(o.hypothesis), o.hypothesis_residual, witness)
        })
        .collect();
    let mut report = NormalCommutationSearchReport {
        attempts: trials,
        seed,
        hypothesis_hits: 0,
        min_hypothesis_residual: f64::INFINITY,
        violations: Vec::new(),
    };
    for (hit, res, witness) in results {
        report.hypothesis_hits += hit;
        report.min_hypothesis_residual = report.min_hypothesis_residual.min(res);
        report.violations.extend(witness);
    }
    Ok(report)
}

/// A pair `(X, Y)` and a state at which per-state criterion (II) holds even
/// though the pair is incompatible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedStateFinding {
    pub seed: u64,
    pub index: u64,
    pub x: Vec<ComplexMatrix>,
    pub y: Vec<ComplexMatrix>,
    pub state: ComplexMatrix,
    pub residual: f64,
    pub incompatibility: f64,
}

/// Best all-state criterion (II) residual seen on an incompatible pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllStateFinding {
    pub seed: u64,
    pub index: u64,
    pub x: Vec<ComplexMatrix>,
    pub y: Vec<ComplexMatrix>,
    /// Normalized operator residual `max_j ‖Σ_k A_k ⋄ B_j − B_j‖ / scale`.
    pub residual: f64,
    pub incompatibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion2GapFindings {
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub margin: f64,
    pub fixed_state_tol: f64,
    /// The maximally mixed witness, built from stream 0.
    pub fixed_state_witness: FixedStateFinding,
    /// Sampled states other than `I/d` at which (II) held for an
    /// incompatible pair.
    pub fixed_state_hits: Vec<FixedStateFinding>,
    /// Every sampled pair also satisfied (II) at `I/d`.
    pub maximally_mixed_always_holds: bool,
    pub best_all_state: Option<AllStateFinding>,
    /// Running minimum of the all-state residual, one entry per trial.
    pub best_residual_trajectory: Vec<f64>,
}

/// Incompatibility floor for the all-state track.
pub const INCOMPATIBILITY_MARGIN: f64 = 1e-3;
pub const FIXED_STATE_TOL: f64 = 1e-10;

fn grams_to_povm(grams: &[ComplexMatrix]) -> Option<Povm> {
    let tol = Tolerances::default();
    let dim = grams[0].dim();
    let mut total = ComplexMatrix::zeros(dim);
    for g in grams {
        total = &total + g;
    }
    let s = hermitian_eigendecomposition(&total, &tol).ok()?;
    if s.min_eigenvalue() <= 1e-10 * s.max_eigenvalue() {
        return None;
    }
    let inv_sqrt = s.map(|l| Complex64::new(l.powf(-0.5), 0.0));
    let elements: Vec<ComplexMatrix> = grams.iter().map(|g| inv_sqrt.sandwich(g)).collect();
    validate_povm(&elements, &tol).ok()
}

fn random_grams(dim: usize, m: usize, rng: &mut StreamRng) -> Vec<ComplexMatrix> {
    (0..m)
        .map(|_| {
            let g = sample_gaussian(dim, rng);
            &g * &g.adjoint()
        })
        .collect()
}

struct TrialOutcome {
    all_state: Option<AllStateFinding>,
    fixed_hit: Option<FixedStateFinding>,
    mixed_holds: bool,
}

fn all_state_score(fam: &crate::PhaseFamily, x: &Povm, y: &Povm) -> Result<(f64, f64)> {
    let r = criterion2_check(fam, x, y, 0.0)?;
    Ok((r.normalized_residual(), compatibility_residual(x, y)?))
}

fn gap_trial(fam: &crate::PhaseFamily, dim: usize, seed: u64, index: u64) -> Result<TrialOutcome> {
    let mut rng = substream(seed, index);
    let m = rng.random_range(2..=3);
    let mut grams = random_grams(dim, m, &mut rng);
    let y = sample_povm(dim, 2, &mut rng);
    let mut x = match grams_to_povm(&grams) {
        Some(x) => x,
        None => sample_povm(dim, m, &mut rng),
    };
    let (mut best, mut incompat) = all_state_score(fam, &x, &y)?;

    // Local refinement of X's generators; keeps the incompatibility margin.
    for step in 0..8 {
        let sigma = 0.5 / (1 + step) as f64;
        let candidate: Vec<ComplexMatrix> = grams
            .iter()
            .map(|g| {
                let n = sample_gaussian(dim, &mut rng).scale(sigma);
                g + &(&n * &n.adjoint())
            })
            .collect();
        if let Some(cx) = grams_to_povm(&candidate) {
            let (r, c) = all_state_score(fam, &cx, &y)?;
            if r < best && c >= INCOMPATIBILITY_MARGIN {
                best = r;
                incompat = c;
                x = cx;
                grams = candidate;
            }
        }
    }

    let all_state = (incompat >= INCOMPATIBILITY_MARGIN).then(|| AllStateFinding {
        seed,
        index,
        x: x.matrices(),
        y: y.matrices(),
        residual: best,
        incompatibility: incompat,
    });

    let mixed = criterion2_fixed_state(fam, &x, &y, &DensityOperator::maximally_mixed(dim), FIXED_STATE_TOL)?;
    let w = sample_density(dim, &mut rng);
    let at_w = criterion2_fixed_state(fam, &x, &y, &w, FIXED_STATE_TOL)?;
    let fixed_hit = (at_w.verdict && incompat >= INCOMPATIBILITY_MARGIN).then(|| FixedStateFinding {
        seed,
        index,
        x: x.matrices(),
        y: y.matrices(),
        state: w.matrix().clone(),
        residual: at_w.max_residual,
        incompatibility: incompat,
    });
    Ok(TrialOutcome {
        all_state,
        fixed_hit,
        mixed_holds: mixed.verdict,
    })
}

/// Two-track search around the converse of criterion (II).
///
/// The fixed-state track always produces the `I/d` witness: for any pair,
/// `Σ_k tr(A_k ⋄ B) / d = tr(B) / d` by cyclicity of the trace, so per-state
/// (II) at `I/d` holds without compatibility. The all-state track samples
/// incompatible pairs, refines them locally, and records the smallest
/// operator residual found; it asserts nothing. Stream 0 builds the witness;
/// trial `i` uses stream `i + 1`.
pub fn search_criterion2_gap(
    fam: &crate::PhaseFamily,
    dim: usize,
    trials: u64,
    seed: u64,
) -> Result<Criterion2GapFindings> {
    if !(2..=crate::matcore::MAX_DIM).contains(&dim) {
        return Err(Error::InvalidParameter(
            "an incompatible pair needs dimension at least 2".into(),
        ));
    }
    let witness = {
        let mut rng = substream(seed, 0);
        loop {
            let x = sample_povm(dim, 2, &mut rng);
            let y = sample_povm(dim, 2, &mut rng);
            let incompat = compatibility_residual(&x, &y)?;
            if incompat < INCOMPATIBILITY_MARGIN {
                continue;
            }
            let w = DensityOperator::maximally_mixed(dim);
            let r = criterion2_fixed_state(fam, &x, &y, &w, FIXED_STATE_TOL)?;
            break FixedStateFinding {
                seed,
                index: 0,
                x: x.matrices(),
                y: y.matrices(),
                state: w.matrix().clone(),
                residual: r.max_residual,
                incompatibility: incompat,
            };
        }
    };

    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| gap_trial(fam, dim, seed, i + 1))
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<AllStateFinding> = None;
    let mut trajectory = Vec::with_capacity(outcomes.len());
    let mut hits = Vec::new();
    let mut mixed_ok = true;
    for o in outcomes {
        mixed_ok &= o.mixed_holds;
        hits.extend(o.fixed_hit);
        if let Some(f) = o.all_state {
            if best.as_ref().is_none_or(|b| f.residual < b.residual) {
                best = Some(f);
            }
        }
        trajectory.push(best.as_ref().map_or(f64::INFINITY, |b| b.residual));
    }
    Ok(Criterion2GapFindings {
        dim,
        trials,
        seed,
        margin: INCOMPATIBILITY_MARGIN,
        fixed_state_tol: FIXED_STATE_TOL,
        fixed_state_witness: witness,
        fixed_state_hits: hits,
        maximally_mixed_always_holds: mixed_ok,
        best_all_state: best,
        best_residual_trajectory: trajectory,
    })
}

/// Rebuilds the pair recorded in an all-state finding.
pub fn replay_pair(finding: &AllStateFinding) -> Result<(Povm, Povm)> {
    let tol = Tolerances::default();
    Ok((validate_povm(&finding.x, &tol)?, validate_povm(&finding.y, &tol)?))
}
