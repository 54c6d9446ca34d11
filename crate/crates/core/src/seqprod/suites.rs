//! Randomized property suites for the sequential-product axioms and for the
//! structural properties of `f_A(A)`.
//!
//! The conditional axioms (S3–S5) have hypotheses of measure zero under
//! generic sampling, so each trial builds instances that satisfy them:
//! orthogonal supports for S3, a shared eigenbasis for S4, and block-diagonal
//! triples for S5.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{phase_apply, sequential_product_matrix, PhaseFamily};
use crate::matcore::{spectral_excursion, ComplexMatrix, Tolerances};
use crate::quantum::{
    in_basis, random_surjection, sample_effect, sample_projection, sample_unitary, validate_effect, EffectOperator,
};
use crate::rng::{substream, StreamRng};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub samples: u64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.max_residual < self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub family: PhaseFamily,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

/// Runs `trial` for every index in parallel and keeps the elementwise
/// maximum. A trial that errors counts as an infinite residual.
pub(crate) fn run_suite<F>(
    suite: &str,
    fam: &PhaseFamily,
    dim: usize,
    trials: u64,
    seed: u64,
    properties: &[(&str, f64)],
    trial: F,
) -> SuiteReport
where
    F: Fn(&mut StreamRng) -> Result<Vec<f64>> + Sync,
{
    let properties = if trials == 0 {
        Vec::new()
    } else {
        let maxima = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i);
                trial(&mut rng).unwrap_or_else(|_| vec![f64::INFINITY; properties.len()])
            })
            .reduce(
                || vec![0.0; properties.len()],
                |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
            );
        properties.iter()
            .zip(maxima)
            .map(|(&(name, threshold), max_residual)| PropertyResult {
                name: name.to_string(),
                max_residual,
                threshold,
                samples: trials,
            })
            .collect()
    };
    SuiteReport {
        suite: suite.to_string(),
        family: *fam,
        dim,
        trials,
        seed,
        properties,
    }
}

fn effect(m: &ComplexMatrix) -> Result<EffectOperator> {
    validate_effect(m, &Tolerances::default())
}

fn diamond(fam: &PhaseFamily, a: &EffectOperator, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    sequential_product_matrix(fam, a, b)
}

/// `√M · D · √M` for an effect `M`; dominated by `M`.
fn squeeze(m: &EffectOperator, d: &ComplexMatrix) -> ComplexMatrix {
    m.spectral().map(|t| Complex64::new(t.sqrt(), 0.0)).sandwich(d)
}

/// Random spectrum in `[0, 1]`; each entry is forced to 0 or 1 with
/// probability 0.2 to exercise the endpoints of the spectrum.
fn sample_spectrum(dim: usize, rng: &mut StreamRng) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let u: f64 = rng.random();
            if u < 0.1 {
                0.0
            } else if u < 0.2 {
                1.0
            } else {
                rng.random()
            }
        })
        .collect()
}

/// Splits `dim` into random positive block sizes.
fn sample_blocks(dim: usize, rng: &mut StreamRng) -> Vec<usize> {
    let parts = rng.random_range(1..=dim);
    let groups = random_surjection(dim, parts, rng);
    (0..parts).map(|g| groups.iter().filter(|&&k| k == g).count()).collect()
}

pub const AXIOM_THRESHOLD: f64 = 1e-9;

/// Maximum residuals of the sequential-product axioms S1–S5 over `trials`
/// hypothesis-targeted random instances.
pub fn verify_axioms(fam: &PhaseFamily, dim: usize, trials: u64, seed: u64) -> SuiteReport {
    const PROPERTIES: [(&str, f64); 11] = [
        ("S1 additivity", AXIOM_THRESHOLD),
        ("S1 sum bounded by I", AXIOM_THRESHOLD),
        ("S2 identity", AXIOM_THRESHOLD),
        ("S3 hypothesis A⋄B = 0", AXIOM_THRESHOLD),
        ("S3 A⋄B = B⋄A", AXIOM_THRESHOLD),
        ("S4 hypothesis A⋄B = B⋄A", AXIOM_THRESHOLD),
        ("S4 complement", AXIOM_THRESHOLD),
        ("S4 associativity", AXIOM_THRESHOLD),
        ("S5 hypotheses", AXIOM_THRESHOLD),
        ("S5 product", AXIOM_THRESHOLD),
        ("S5 sum", AXIOM_THRESHOLD),
    ];
    let id = ComplexMatrix::identity(dim);
    run_suite("axioms", fam, dim, trials, seed, &PROPERTIES, |rng| {
        let mut out = Vec::with_capacity(PROPERTIES.len());

        // S1: C = √(I−B) D √(I−B) ≤ I − B.
        let a = sample_effect(dim, rng);
        let b = sample_effect(dim, rng);
        let d = sample_effect(dim, rng);
        let c = squeeze(&b.complement(&Tolerances::default())?, d.matrix());
        let ab = diamond(fam, &a, b.matrix())?;
        let ac = diamond(fam, &a, &c)?;
        let a_bc = diamond(fam, &a, &(b.matrix() + &c))?;
        let sum = &ab + &ac;
        out.push(sum.distance_unchecked(&a_bc));
        out.push(spectral_excursion(&sum)?);

        // S2
        let e = EffectOperator::identity(dim);
        out.push(diamond(fam, &e, a.matrix())?.distance_unchecked(a.matrix()));

        // S3: A supported on the first r basis vectors of U, B on the rest.
        let u = sample_unitary(dim, rng);
        let r = rng.random_range(0..=dim);
        let mut a_blocks = Vec::new();
        let mut b_blocks = Vec::new();
        if r > 0 {
            a_blocks.push(sample_effect(r, rng).matrix().clone());
            b_blocks.push(ComplexMatrix::zeros(r));
        }
        if r < dim {
            a_blocks.push(ComplexMatrix::zeros(dim - r));
            b_blocks.push(sample_effect(dim - r, rng).matrix().clone());
        }
        let a3 = effect(&u.sandwich(&ComplexMatrix::block_diagonal(&a_blocks)?))?;
        let b3 = effect(&u.sandwich(&ComplexMatrix::block_diagonal(&b_blocks)?))?;
        let ab3 = diamond(fam, &a3, b3.matrix())?;
        let ba3 = diamond(fam, &b3, a3.matrix())?;
        out.push(ab3.frobenius_norm());
        out.push(ab3.distance_unchecked(&ba3));

        // S4: A, B diagonal in a shared basis.
        let u = sample_unitary(dim, rng);
        let a4 = effect(&in_basis(&u, &sample_spectrum(dim, rng)))?;
        let b4 = effect(&in_basis(&u, &sample_spectrum(dim, rng)))?;
        let c4 = sample_effect(dim, rng);
        let ab4 = diamond(fam, &a4, b4.matrix())?;
        out.push(ab4.distance_unchecked(&diamond(fam, &b4, a4.matrix())?));
        let nb4 = effect(&(&id - b4.matrix()))?;
        out.push(diamond(fam, &a4, nb4.matrix())?.distance_unchecked(&diamond(fam, &nb4, a4.matrix())?));
        let left = diamond(fam, &a4, &diamond(fam, &b4, c4.matrix())?)?;
        let right = diamond(fam, &effect(&ab4)?, c4.matrix())?;
        out.push(left.distance_unchecked(&right));

        // S5: C scalar on each block, A and B block-diagonal with A + B ≤ I.
        let u = sample_unitary(dim, rng);
        let sizes = sample_blocks(dim, rng);
        let c_blocks: Vec<ComplexMatrix> = sizes
            .iter()
            .map(|&s| ComplexMatrix::identity(s).scale(rng.random()))
            .collect();
        let a_blocks: Vec<ComplexMatrix> = sizes.iter().map(|&s| sample_effect(s, rng).matrix().clone()).collect();
        let d_blocks: Vec<ComplexMatrix> = sizes.iter().map(|&s| sample_effect(s, rng).matrix().clone()).collect();
        let a_blk = effect(&ComplexMatrix::block_diagonal(&a_blocks)?)?;
        let b_blk = squeeze(&a_blk.complement(&Tolerances::default())?, &ComplexMatrix::block_diagonal(&d_blocks)?);
        let c5 = effect(&u.sandwich(&ComplexMatrix::block_diagonal(&c_blocks)?))?;
        let a5 = effect(&u.sandwich(a_blk.matrix()))?;
        let b5 = effect(&u.sandwich(&b_blk))?;
        let hyp_a = diamond(fam, &c5, a5.matrix())?.distance_unchecked(&diamond(fam, &a5, c5.matrix())?);
        let hyp_b = diamond(fam, &c5, b5.matrix())?.distance_unchecked(&diamond(fam, &b5, c5.matrix())?);
        out.push(hyp_a.max(hyp_b));
        let ab5 = effect(&diamond(fam, &a5, b5.matrix())?)?;
        out.push(diamond(fam, &c5, ab5.matrix())?.distance_unchecked(&diamond(fam, &ab5, c5.matrix())?));
        let apb = effect(&(a5.matrix() + b5.matrix()))?;
        out.push(diamond(fam, &c5, apb.matrix())?.distance_unchecked(&diamond(fam, &apb, c5.matrix())?));

        Ok(out)
    })
}

pub const CALCULUS_THRESHOLD: f64 = 1e-9;
pub const KERNEL_THRESHOLD: f64 = 1e-10;
pub const EFFECT_SLACK: f64 = 1e-10;

/// Maximum residuals of the structural properties of `f_A(A)`:
/// `f f̄ = f̄ f = A` and `f(A)* = f̄(A)`; `f(A)` annihilates `ker A`; the
/// spectral formula agrees with polynomial evaluation; `f_E(E) = f(1) E` on
/// projections; `A ⋄ B` is an effect.
pub fn verify_phase_calculus(fam: &PhaseFamily, dim: usize, trials: u64, seed: u64) -> SuiteReport {
    const PROPERTIES: [(&str, f64); 7] = [
        ("f·f̄ = A", CALCULUS_THRESHOLD),
        ("f̄·f = A", CALCULUS_THRESHOLD),
        ("f(A)* = f̄(A)", CALCULUS_THRESHOLD),
        ("kernel containment", KERNEL_THRESHOLD),
        ("spectral formula vs polynomial", CALCULUS_THRESHOLD),
        ("f_E(E) = f(1)E", CALCULUS_THRESHOLD),
        ("A⋄B ∈ E(H)", EFFECT_SLACK),
    ];
    run_suite("phase calculus", fam, dim, trials, seed, &PROPERTIES, |rng| {
        let mut out = Vec::with_capacity(PROPERTIES.len());

        let a = sample_effect(dim, rng);
        let f = phase_apply(fam, &a);
        let fbar = a.spectral().map(|t| fam.eval(t).conj());
        out.push((&f * &fbar).distance_unchecked(a.matrix()));
        out.push((&fbar * &f).distance_unchecked(a.matrix()));
        out.push(f.adjoint().distance_unchecked(&fbar));

        // Rank-deficient effect with a known kernel: the first k columns of U.
        let u = sample_unitary(dim, rng);
        let k = rng.random_range(1..=dim);
        let values: Vec<f64> = (0..dim).map(|i| if i < k { 0.0 } else { rng.random() }).collect();
        let a2 = effect(&in_basis(&u, &values))?;
        let f2 = phase_apply(fam, &a2);
        let mut worst = 0.0_f64;
        for col in 0..k {
            let v: Vec<Complex64> = (0..dim).map(|i| u.get(i, col)).collect();
            let img: f64 = (0..dim)
                .map(|i| (0..dim).map(|j| f2.get(i, j) * v[j]).sum::<Complex64>().norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(img);
        }
        out.push(worst);

        // Random complex polynomial of degree 5, Horner on the matrix.
        let coeffs: Vec<Complex64> = (0..6)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let spectral = a.spectral().map(|t| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c));
        let id = ComplexMatrix::identity(dim);
        let horner = coeffs
            .iter()
            .rev()
            .fold(ComplexMatrix::zeros(dim), |acc, c| &(&acc * a.matrix()) + &id.scale_complex(*c));
        out.push(spectral.distance_unchecked(&horner));

        let e = sample_projection(dim, rng);
        out.push(phase_apply(fam, &e).distance_unchecked(&e.matrix().scale_complex(fam.eval(1.0))));

        let b = sample_effect(dim, rng);
        out.push(spectral_excursion(&sequential_product_matrix(fam, &a, b.matrix())?)?);

        Ok(out)
    })
}
