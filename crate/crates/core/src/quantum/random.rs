//! Seeded instance generators.
//!
//! Each public `random_*` function takes a 64-bit seed and draws from stream
//! 0 under it; the `sample_*` variants take any RNG so that suites can feed
//! per-trial substreams.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{validate_density, validate_effect, validate_povm, DensityOperator, EffectOperator, Povm};
use crate::matcore::{hermitian_eigendecomposition, ComplexMatrix, Tolerances, MAX_DIM};
use crate::rng::substream;
use crate::{Error, Result};

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

/// Matrix with i.i.d. standard normal real and imaginary parts.
pub fn sample_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexMatrix::from_row_major(dim, &entries).expect("finite gaussian draw")
}

/// Unitary from the QR factorization of a Gaussian matrix, with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn sample_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = sample_gaussian(dim, rng).into_inner();
        let qr = g.qr();
        let r = qr.r();
        if (0..dim).any(|i| r[(i, i)].norm() < 1e-12) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..dim {
            let phase = r[(j, j)] / r[(j, j)].norm();
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        return ComplexMatrix::from_inner(q);
    }
}

/// Uniform point of the probability simplex with `parts` vertices.
pub fn sample_simplex<R: Rng + ?Sized>(parts: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..parts).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            return w.into_iter().map(|x| x / s).collect();
        }
    }
}

/// `U · diag(values) · U*`.
pub fn in_basis(u: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    let d = ComplexMatrix::from_real_diagonal(values).expect("finite diagonal");
    u.sandwich(&d)
}

pub fn sample_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> EffectOperator {
    let tol = Tolerances::default();
    let h = sample_gaussian(dim, rng).hermitian_part();
    let s = hermitian_eigendecomposition(&h, &tol).expect("hermitian by construction");
    let (lo, hi) = (s.min_eigenvalue(), s.max_eigenvalue());
    let m = if hi - lo < 1e-12 {
        ComplexMatrix::identity(dim)
    } else {
        (&h - &ComplexMatrix::identity(dim).scale(lo)).scale(1.0 / (hi - lo))
    };
    validate_effect(&m, &tol).expect("shift-scale output is an effect")
}

pub fn sample_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    loop {
        let m = sample_gaussian(dim, rng);
        let mm = &m * &m.adjoint();
        let tr = mm.trace().re;
        if tr > 1e-300 {
            return validate_density(&mm.scale(1.0 / tr), &Tolerances::default())
                .expect("normalized Gram matrix is a state");
        }
    }
}

pub fn sample_povm<R: Rng + ?Sized>(dim: usize, m: usize, rng: &mut R) -> Povm {
    let tol = Tolerances::default();
    loop {
        let grams: Vec<ComplexMatrix> = (0..m)
            .map(|_| {
                let g = sample_gaussian(dim, rng);
                &g * &g.adjoint()
            })
            .collect();
        let mut total = ComplexMatrix::zeros(dim);
        for g in &grams {
            total = &total + g;
        }
        let s = hermitian_eigendecomposition(&total, &tol).expect("hermitian sum");
        if s.min_eigenvalue() <= 1e-10 * s.max_eigenvalue() {
            continue;
        }
        let inv_sqrt = s.map(|l| Complex64::new(l.powf(-0.5), 0.0));
        let elements: Vec<ComplexMatrix> = grams.iter().map(|g| inv_sqrt.sandwich(g)).collect();
        if let Ok(p) = validate_povm(&elements, &tol) {
            return p.with_label("random_povm");
        }
    }
}

/// Sharp POVM: a random orthonormal basis split into `parts` non-empty groups.
pub fn sample_pvm<R: Rng + ?Sized>(dim: usize, parts: usize, rng: &mut R) -> Povm {
    let u = sample_unitary(dim, rng);
    pvm_in_basis(&u, parts, rng)
}

/// Groups the columns of `u` into `parts` non-empty blocks at random and
/// returns the block projectors.
pub fn pvm_in_basis<R: Rng + ?Sized>(u: &ComplexMatrix, parts: usize, rng: &mut R) -> Povm {
    let dim = u.dim();
    let groups = random_surjection(dim, parts, rng);
    let elements: Vec<ComplexMatrix> = (0..parts)
        .map(|g| {
            let ind: Vec<f64> = groups.iter().map(|&k| if k == g { 1.0 } else { 0.0 }).collect();
            in_basis(u, &ind)
        })
        .collect();
    validate_povm(&elements, &Tolerances::default())
        .expect("block projectors of a unitary form a PVM")
        .with_label("random_pvm")
}

/// POVM diagonal in the basis `u`, with a uniform simplex point per basis
/// vector.
pub fn simplex_povm_in_basis<R: Rng + ?Sized>(u: &ComplexMatrix, m: usize, rng: &mut R) -> Povm {
    let dim = u.dim();
    let columns: Vec<Vec<f64>> = (0..dim).map(|_| sample_simplex(m, rng)).collect();
    let elements: Vec<ComplexMatrix> = (0..m)
        .map(|k| {
            let values: Vec<f64> = columns.iter().map(|p| p[k]).collect();
            in_basis(u, &values)
        })
        .collect();
    validate_povm(&elements, &Tolerances::default()).expect("simplex columns sum to one")
}

/// Assigns each of `n` items to one of `parts` groups so that no group is empty.
pub fn random_surjection<R: Rng + ?Sized>(n: usize, parts: usize, rng: &mut R) -> Vec<usize> {
    assert!(parts >= 1 && parts <= n, "need 1 <= parts <= n");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut groups = vec![0; n];
    for (slot, &i) in order.iter().enumerate() {
        groups[i] = if slot < parts { slot } else { rng.random_range(0..parts) };
    }
    groups
}

/// Orthogonal projection of uniformly random rank in `0..=dim` onto a random subspace.
pub fn sample_projection<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> EffectOperator {
    let rank = rng.random_range(0..=dim);
    let u = sample_unitary(dim, rng);
    let values: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    validate_effect(&in_basis(&u, &values), &Tolerances::default()).expect("projection is an effect")
}

pub fn random_effect(dim: usize, seed: u64) -> Result<EffectOperator> {
    check_dim(dim)?;
    Ok(sample_effect(dim, &mut substream(seed, 0)))
}

pub fn random_density(dim: usize, seed: u64) -> Result<DensityOperator> {
    check_dim(dim)?;
    Ok(sample_density(dim, &mut substream(seed, 0)))
}

pub fn random_povm(dim: usize, m: usize, seed: u64) -> Result<Povm> {
    check_dim(dim)?;
    if m == 0 {
        return Err(Error::InvalidParameter("POVM needs at least one outcome".into()));
    }
    Ok(sample_povm(dim, m, &mut substream(seed, 0)))
}

pub fn random_pvm(dim: usize, parts: usize, seed: u64) -> Result<Povm> {
    check_dim(dim)?;
    if parts == 0 || parts > dim {
        return Err(Error::InvalidParameter(format!("parts must lie in 1..={dim}")));
    }
    Ok(sample_pvm(dim, parts, &mut substream(seed, 0)))
}

pub fn sample_commuting_povm_pair<R: Rng + ?Sized>(dim: usize, m: usize, n: usize, rng: &mut R) -> (Povm, Povm) {
    let u = sample_unitary(dim, rng);
    let x = simplex_povm_in_basis(&u, m, rng).with_label("X");
    let y = simplex_povm_in_basis(&u, n, rng).with_label("Y");
    (x, y)
}

/// Two POVMs diagonal in one shared random basis.
pub fn random_commuting_povm_pair(dim: usize, m: usize, n: usize, seed: u64) -> Result<(Povm, Povm)> {
    check_dim(dim)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("POVMs need at least one outcome".into()));
    }
    Ok(sample_commuting_povm_pair(dim, m, n, &mut substream(seed, 0)))
}

pub fn sample_compatible_sharp_pair<R: Rng + ?Sized>(
    dim: usize,
    m: usize,
    parts: usize,
    rng: &mut R,
) -> (Povm, Povm) {
    let u = sample_unitary(dim, rng);
    let x = simplex_povm_in_basis(&u, m, rng).with_label("X");
    let y = pvm_in_basis(&u, parts, rng).with_label("Y");
    (x, y)
}

/// An unsharp POVM `X` and a sharp POVM `Y` sharing an eigenbasis.
pub fn random_compatible_sharp_pair(dim: usize, m: usize, parts: usize, seed: u64) -> Result<(Povm, Povm)> {
    check_dim(dim)?;
    if m == 0 || parts == 0 || parts > dim {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1 and 1 <= parts <= {dim}"
        )));
    }
    Ok(sample_compatible_sharp_pair(dim, m, parts, &mut substream(seed, 0)))
}

/// Random normal operator `U · diag(z) · U*` with complex Gaussian `z`; each
/// eigenvalue is zeroed with probability `zero_prob`.
pub fn sample_normal<R: Rng + ?Sized>(dim: usize, zero_prob: f64, rng: &mut R) -> ComplexMatrix {
    let u = sample_unitary(dim, rng);
    let z: Vec<Complex64> = (0..dim)
        .map(|_| {
            let v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            if rng.random::<f64>() < zero_prob {
                Complex64::new(0.0, 0.0)
            } else {
                v
            }
        })
        .collect();
    let d = ComplexMatrix::from_diagonal(&z).expect("finite");
    u.sandwich(&d)
}
