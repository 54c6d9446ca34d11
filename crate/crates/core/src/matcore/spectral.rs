use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{ComplexMatrix, Tolerances};
use crate::{Error, Result};

/// Spectral form `M = Σ_k λ_k E_k` with distinct ascending eigenvalues and
/// pairwise orthogonal projectors summing to the identity.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `Σ_k f(λ_k) E_k` for a total function `f`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d = self.dim();
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        for (&l, e) in self.eigenvalues.iter().zip(&self.projectors) {
            let w = f(l);
            if w != Complex64::new(0.0, 0.0) {
                acc += e.as_inner() * w;
            }
        }
        ComplexMatrix::from_inner(acc)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    /// Rewrites the eigenvalues through `g`, re-merging any that collide.
    pub(crate) fn remap_eigenvalues(&mut self, g: impl Fn(f64) -> f64) {
        for l in &mut self.eigenvalues {
            *l = g(*l);
        }
        self.merge_equal();
    }

    fn merge_equal(&mut self) {
        let mut values: Vec<f64> = Vec::with_capacity(self.eigenvalues.len());
        let mut projs: Vec<ComplexMatrix> = Vec::with_capacity(self.projectors.len());
        for (l, e) in self.eigenvalues.drain(..).zip(self.projectors.drain(..)) {
            match values.last() {
                Some(&prev) if prev == l => {
                    let last = projs.pop().unwrap();
                    projs.push(&last + &e);
                }
                _ => {
                    values.push(l);
                    projs.push(e);
                }
            }
        }
        self.eigenvalues = values;
        self.projectors = projs;
    }
}

/// Eigendecomposition of a Hermitian matrix with clustering.
///
/// The input is symmetrized as `(M + M*) / 2` first. Sorted eigenvalues whose
/// consecutive gap is below `tol.eig_cluster` form one cluster (single
/// linkage); the cluster value is the member mean and its projector the sum
/// of the member rank-one projectors. Cluster values within `eig_cluster` of
/// 0 or 1 are snapped exactly onto 0 or 1.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let adj = m.adjoint();
    let residual = m.distance_unchecked(&adj);
    if residual > tol.eq_threshold(m, &adj) {
        return Err(Error::NotHermitian { residual });
    }
    let h = m.hermitian_part();
    let d = h.dim();
    let eig = SymmetricEigen::try_new(h.into_inner(), f64::EPSILON, 1000 * d)
        .ok_or(Error::EigenFailure)?;
    if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigenFailure);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < tol.eig_cluster {
            end += 1;
        }
        let members = &order[start..end];
        let mean = members.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / members.len() as f64;
        let mut proj = DMatrix::<Complex64>::zeros(d, d);
        for &i in members {
            let v = eig.eigenvectors.column(i);
            proj += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(ComplexMatrix::from_inner(proj));
        start = end;
    }

    let mut s = SpectralDecomposition {
        eigenvalues,
        projectors,
    };
    let snap = tol.eig_cluster;
    s.remap_eigenvalues(|l| {
        if l.abs() < snap {
            0.0
        } else if (l - 1.0).abs() < snap {
            1.0
        } else {
            l
        }
    });
    Ok(s)
}

/// Unclustered eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let h = m.hermitian_part();
    let d = h.dim();
    let eig = SymmetricEigen::try_new(h.into_inner(), f64::EPSILON, 1000 * d).ok_or(Error::EigenFailure)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigenFailure);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `Σ_k f(λ_k) E_k`; fails if `f` is undefined (returns `None`) or non-finite
/// at some eigenvalue.
pub fn apply_borel_function(
    s: &SpectralDecomposition,
    f: impl Fn(f64) -> Option<Complex64>,
) -> Result<ComplexMatrix> {
    let mut values = Vec::with_capacity(s.len());
    for &l in s.eigenvalues() {
        match f(l) {
            Some(w) if w.re.is_finite() && w.im.is_finite() => values.push(w),
            _ => return Err(Error::UndefinedFunction(l)),
        }
    }
    let d = s.dim();
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for (w, e) in values.into_iter().zip(s.projectors()) {
        acc += e.as_inner() * w;
    }
    Ok(ComplexMatrix::from_inner(acc))
}
