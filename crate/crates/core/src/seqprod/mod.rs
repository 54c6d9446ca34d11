//! General sequential products `A ⋄ B = f_A(A) · B · f_A(A)*` and the
//! measurement statistics built on them.
//!
//! The phase family is `f(t) = xi0 · t^(1/2 + i c)` with `f(0) = 0`. It
//! satisfies `|f(t)| = √t` and `f(s) f(t) = xi0 f(st)`, so the product it
//! induces has all of the sequential-product axioms. `c = 0, xi0 = 1` gives
//! the square-root product `A^(1/2) B A^(1/2)`.

mod sampler;
mod suites;

pub use sampler::{exact_grid, sample_sequential, MeasurementOutcomeTable};
pub(crate) use suites::run_suite;
pub use suites::{verify_axioms, verify_phase_calculus, PropertyResult, SuiteReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matcore::{ComplexMatrix, Tolerances};
use crate::quantum::{validate_density, validate_effect, DensityOperator, EffectOperator, Povm};
use crate::{Error, Result};

/// Probabilities at or below this are treated as zero when conditioning.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// The admissible family `f(t) = xi0 · t^(1/2 + i c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseFamily {
    c: f64,
    xi0: Complex64,
}

impl PhaseFamily {
    /// Family with prefactor `xi0 = e^{i·xi0_arg}`.
    pub fn new(c: f64, xi0_arg: f64) -> Self {
        Self {
            c,
            xi0: Complex64::from_polar(1.0, xi0_arg),
        }
    }

    pub fn with_prefactor(c: f64, xi0: Complex64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("c must be finite, got {c}")));
        }
        let modulus = xi0.norm();
        if (modulus - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular(modulus));
        }
        Ok(Self { c, xi0 })
    }

    /// `c = 0, xi0 = 1`: `A ⋄ B = A^(1/2) B A^(1/2)`.
    pub fn square_root() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn xi0(&self) -> Complex64 {
        self.xi0
    }

    /// `f(t)`; non-positive arguments map to 0.
    pub fn eval(&self, t: f64) -> Complex64 {
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.xi0 * t.sqrt() * Complex64::from_polar(1.0, self.c * t.ln())
    }
}

impl Default for PhaseFamily {
    fn default() -> Self {
        Self::square_root()
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `f_A(A) = Σ_k f(λ_k) E_k` over the cached spectral decomposition of `A`.
pub fn phase_apply(fam: &PhaseFamily, a: &EffectOperator) -> ComplexMatrix {
    a.spectral().map(|t| fam.eval(t))
}

/// `f_A(A) · B · f_A(A)*` for an arbitrary middle operator, unvalidated.
pub fn sequential_product_matrix(fam: &PhaseFamily, a: &EffectOperator, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(phase_apply(fam, a).sandwich(b))
}

/// `A ⋄ B`, validated as an effect.
pub fn sequential_product(fam: &PhaseFamily, a: &EffectOperator, b: &EffectOperator) -> Result<EffectOperator> {
    let m = sequential_product_matrix(fam, a, b.matrix())?;
    validate_effect(&m, &Tolerances::default())
}

/// Unnormalized post-measurement state `f_A(A)* · W · f_A(A)`.
pub fn luders_channel_state(fam: &PhaseFamily, a: &EffectOperator, w: &DensityOperator) -> Result<ComplexMatrix> {
    check_dims(a.dim(), w.dim())?;
    let f = phase_apply(fam, a);
    Ok(f.adjoint().sandwich(w.matrix()))
}

/// `p_W(A) = tr(A W)`. The phase family drops out because `f f̄ = A`; it is
/// kept in the signature so callers treat every statistic uniformly.
pub fn probability(_fam: &PhaseFamily, w: &DensityOperator, a: &EffectOperator) -> Result<f64> {
    check_dims(a.dim(), w.dim())?;
    Ok(a.matrix().trace_product(w.matrix()).re)
}

/// `tr(ψ^A(W))`, the channel route to the same number as [`probability`].
pub fn probability_via_channel(fam: &PhaseFamily, w: &DensityOperator, a: &EffectOperator) -> Result<f64> {
    Ok(luders_channel_state(fam, a, w)?.trace().re)
}

fn conditioning_mass(fam: &PhaseFamily, w: &DensityOperator, a: &EffectOperator) -> Result<f64> {
    let p = probability(fam, w, a)?;
    if p <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability(p));
    }
    Ok(p)
}

/// `W_A = ψ^A(W) / tr(ψ^A(W))`.
pub fn post_state(fam: &PhaseFamily, w: &DensityOperator, a: &EffectOperator) -> Result<DensityOperator> {
    let p = conditioning_mass(fam, w, a)?;
    let unnormalized = luders_channel_state(fam, a, w)?;
    validate_density(&unnormalized.scale(1.0 / p), &Tolerances::default())
}

/// `p_W(B | A) = tr((A ⋄ B) W) / tr(A W)`.
pub fn conditional_probability(
    fam: &PhaseFamily,
    w: &DensityOperator,
    b: &EffectOperator,
    a: &EffectOperator,
) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let p = conditioning_mass(fam, w, a)?;
    let ab = sequential_product_matrix(fam, a, b.matrix())?;
    Ok(ab.trace_product(w.matrix()).re / p)
}

/// `p_{W_A}(B)`, computed through the normalized post-state.
pub fn conditional_probability_nested(
    fam: &PhaseFamily,
    w: &DensityOperator,
    b: &EffectOperator,
    a: &EffectOperator,
) -> Result<f64> {
    let wa = post_state(fam, w, a)?;
    probability(fam, &wa, b)
}

/// Probability of `C` after `A` and then `B` have been observed:
/// `tr(C f̄_B f̄_A W f_A f_B) / tr(B f̄_A W f_A)`, by explicit products.
pub fn two_step_conditional(
    fam: &PhaseFamily,
    w: &DensityOperator,
    c: &EffectOperator,
    a: &EffectOperator,
    b: &EffectOperator,
) -> Result<f64> {
    check_dims(a.dim(), w.dim())?;
    check_dims(b.dim(), w.dim())?;
    check_dims(c.dim(), w.dim())?;
    let fa = phase_apply(fam, a);
    let fb = phase_apply(fam, b);
    let after_a = fa.adjoint().sandwich(w.matrix());
    let denominator = b.matrix().trace_product(&after_a).re;
    if denominator <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability(denominator));
    }
    let after_ab = fb.adjoint().sandwich(&after_a);
    Ok(c.matrix().trace_product(&after_ab).re / denominator)
}

/// Same quantity via two successive normalized post-states.
pub fn two_step_conditional_nested(
    fam: &PhaseFamily,
    w: &DensityOperator,
    c: &EffectOperator,
    a: &EffectOperator,
    b: &EffectOperator,
) -> Result<f64> {
    let wa = post_state(fam, w, a)?;
    conditional_probability(fam, &wa, c, b)
}

/// `Σ_k A_k ⋄ B`, unvalidated.
pub fn heisenberg_image_matrix(fam: &PhaseFamily, x: &Povm, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::zeros(b.dim());
    for a in x.elements() {
        acc = &acc + &sequential_product_matrix(fam, a, b)?;
    }
    Ok(acc)
}

/// `Σ_k A_k ⋄ B`, the effect "B after a non-selective measurement of X".
pub fn heisenberg_image(fam: &PhaseFamily, x: &Povm, b: &EffectOperator) -> Result<EffectOperator> {
    validate_effect(&heisenberg_image_matrix(fam, x, b.matrix())?, &Tolerances::default())
}
