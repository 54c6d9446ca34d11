//! Validated quantum objects: effects, density operators and POVMs.

mod random;

pub use random::*;

use crate::matcore::{commutator_norm, hermitian_eigendecomposition, ComplexMatrix, SpectralDecomposition, Tolerances};
use crate::{Error, Result};

/// An operator `A` with `0 ≤ A ≤ I`, together with its cached spectral
/// decomposition (eigenvalues clamped into `[0, 1]`).
#[derive(Debug, Clone)]
pub struct EffectOperator {
    matrix: ComplexMatrix,
    spectral: SpectralDecomposition,
}

impl EffectOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn identity(dim: usize) -> Self {
        validate_effect(&ComplexMatrix::identity(dim), &Tolerances::default()).expect("identity is an effect")
    }

    pub fn zero(dim: usize) -> Self {
        validate_effect(&ComplexMatrix::zeros(dim), &Tolerances::default()).expect("zero is an effect")
    }

    /// `I − A`.
    pub fn complement(&self, tol: &Tolerances) -> Result<Self> {
        validate_effect(&(&ComplexMatrix::identity(self.dim()) - &self.matrix), tol)
    }

    /// `max_k min(λ_k, 1 − λ_k)`: distance of the spectrum from `{0, 1}`.
    pub fn sharpness_residual(&self) -> f64 {
        self.spectral
            .eigenvalues()
            .iter()
            .map(|&l| l.min(1.0 - l))
            .fold(0.0, f64::max)
    }
}

/// A state: positive semidefinite with unit trace.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }
}

/// A finite family of effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<EffectOperator>,
    label: String,
}

impl Povm {
    pub fn elements(&self) -> &[EffectOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        self.elements.iter().map(|e| e.matrix().clone()).collect()
    }

    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![EffectOperator::identity(dim)],
            label: "trivial".into(),
        }
    }

    pub fn is_sharp(&self, tol: &Tolerances) -> bool {
        self.elements.iter().all(|e| is_sharp(e, tol))
    }
}

pub fn validate_effect(m: &ComplexMatrix, tol: &Tolerances) -> Result<EffectOperator> {
    let mut spectral = hermitian_eigendecomposition(m, tol)?;
    let (lo, hi) = (spectral.min_eigenvalue(), spectral.max_eigenvalue());
    for value in [lo, hi] {
        if value < -tol.psd_slack || value > 1.0 + tol.psd_slack {
            return Err(Error::SpectrumOutOfRange {
                value,
                lo: -tol.psd_slack,
                hi: 1.0 + tol.psd_slack,
            });
        }
    }
    spectral.remap_eigenvalues(|l| l.clamp(0.0, 1.0));
    Ok(EffectOperator {
        matrix: m.hermitian_part(),
        spectral,
    })
}

pub fn validate_density(m: &ComplexMatrix, tol: &Tolerances) -> Result<DensityOperator> {
    let spectral = hermitian_eigendecomposition(m, tol)?;
    let lo = spectral.min_eigenvalue();
    if lo < -tol.psd_slack {
        return Err(Error::SpectrumOutOfRange {
            value: lo,
            lo: -tol.psd_slack,
            hi: f64::INFINITY,
        });
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > tol.mat_eq * m.dim() as f64 {
        return Err(Error::TraceNotOne(tr));
    }
    Ok(DensityOperator {
        matrix: m.hermitian_part(),
    })
}

pub fn validate_povm(mats: &[ComplexMatrix], tol: &Tolerances) -> Result<Povm> {
    let first = mats.first().ok_or(Error::EmptyPovm)?;
    let dim = first.dim();
    let mut elements = Vec::with_capacity(mats.len());
    let mut sum = ComplexMatrix::zeros(dim);
    for (index, m) in mats.iter().enumerate() {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: m.dim(),
            });
        }
        let e = validate_effect(m, tol).map_err(|source| Error::PovmElement {
            index,
            source: Box::new(source),
        })?;
        sum = &sum + e.matrix();
        elements.push(e);
    }
    let id = ComplexMatrix::identity(dim);
    let deviation = sum.distance_unchecked(&id);
    if deviation > tol.eq_threshold(&sum, &id) {
        return Err(Error::PovmSum { deviation });
    }
    Ok(Povm {
        elements,
        label: String::new(),
    })
}

/// Every clustered eigenvalue lies within `mat_eq · dim` of `{0, 1}`.
pub fn is_sharp(a: &EffectOperator, tol: &Tolerances) -> bool {
    a.sharpness_residual() <= tol.mat_eq * a.dim() as f64
}

pub fn commutes(a: &EffectOperator, b: &EffectOperator, tol: &Tolerances) -> Result<bool> {
    let n = commutator_norm(a.matrix(), b.matrix())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(n <= tol.eq_threshold(&ab, &ba))
}

/// Largest `‖A_k B_j − B_j A_k‖_F` over all pairs.
pub fn max_commutator(x: &Povm, y: &Povm) -> Result<f64> {
    let mut worst = 0.0_f64;
    for a in x.elements() {
        for b in y.elements() {
            worst = worst.max(commutator_norm(a.matrix(), b.matrix())?);
        }
    }
    Ok(worst)
}

pub fn povms_compatible(x: &Povm, y: &Povm, tol: &Tolerances) -> Result<bool> {
    for a in x.elements() {
        for b in y.elements() {
            if !commutes(a, b, tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The qubit projections `P = diag(1, 0)` and `Q = |+⟩⟨+|`, the smallest
/// non-commuting sharp pair.
pub fn qubit_pq() -> (EffectOperator, EffectOperator) {
    let tol = Tolerances::default();
    let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap();
    let q = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
    (validate_effect(&p, &tol).unwrap(), validate_effect(&q, &tol).unwrap())
}

/// Two-outcome POVM `{E, I − E}`.
pub fn binary_povm(e: &EffectOperator, tol: &Tolerances) -> Result<Povm> {
    let c = e.complement(tol)?;
    validate_povm(&[e.matrix().clone(), c.matrix().clone()], tol)
}
