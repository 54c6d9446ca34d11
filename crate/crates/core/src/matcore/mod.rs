//! Dense complex matrix arithmetic, Hermitian eigendecomposition and the
//! Borel functional calculus.

mod matrix;
mod spectral;
mod tolerance;

pub use matrix::{ComplexMatrix, MAX_DIM};
pub use spectral::{apply_borel_function, hermitian_eigendecomposition, hermitian_eigenvalues, SpectralDecomposition};
pub use tolerance::Tolerances;

use crate::Result;

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn frobenius_distance(m: &ComplexMatrix, n: &ComplexMatrix) -> Result<f64> {
    m.check_same_dim(n)?;
    Ok(m.distance_unchecked(n))
}

/// `‖AB − BA‖_F`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    let ab = a * b;
    let ba = b * a;
    Ok(ab.distance_unchecked(&ba))
}

/// How far the spectrum of the Hermitian part of `m` leaves `[0, 1]`.
pub fn spectral_excursion(m: &ComplexMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(m)?;
    let lo = values[0];
    let hi = values[values.len() - 1];
    Ok((-lo).max(hi - 1.0).max(0.0))
}

pub fn is_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    let h = m.adjoint();
    tol.approx_eq(m, &h)
}

pub fn is_normal(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    let h = m.adjoint();
    tol.approx_eq(&(m * &h), &(&h * m))
}

/// Hermitian with every eigenvalue inside `[-psd_slack, 1 + psd_slack]`.
pub fn is_effect(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    if !is_hermitian(m, tol) {
        return false;
    }
    match hermitian_eigendecomposition(m, tol) {
        Ok(s) => s
            .eigenvalues()
            .iter()
            .all(|&l| l >= -tol.psd_slack && l <= 1.0 + tol.psd_slack),
        Err(_) => false,
    }
}
