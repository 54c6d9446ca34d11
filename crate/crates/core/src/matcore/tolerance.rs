use serde::{Deserialize, Serialize};

use super::ComplexMatrix;

/// Numerical thresholds shared by every check in the crate.
///
/// `mat_eq` is relative: two matrices are equal when their Frobenius distance
/// is at most `mat_eq · dim · max(1, ‖M‖_F, ‖N‖_F)`. The other two are
/// absolute, which is adequate because effects have spectra inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Raw eigenvalues closer than this merge into one cluster. Clusters this
    /// close to 0 or 1 are snapped onto those points.
    pub eig_cluster: f64,
    pub mat_eq: f64,
    /// Allowed excursion of an effect's spectrum outside `[0, 1]`.
    pub psd_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_cluster: 1e-10,
            mat_eq: 1e-9,
            psd_slack: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn with_mat_eq(mut self, mat_eq: f64) -> Self {
        self.mat_eq = mat_eq;
        self
    }

    pub fn is_valid(&self) -> bool {
        [self.eig_cluster, self.mat_eq, self.psd_slack]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
    }

    /// `base · dim · max(1, norms...)`.
    pub fn scaled(base: f64, dim: usize, norms: &[f64]) -> f64 {
        let m = norms.iter().copied().fold(1.0_f64, f64::max);
        base * dim as f64 * m
    }

    /// Threshold for comparing `m` against `n`.
    pub fn eq_threshold(&self, m: &ComplexMatrix, n: &ComplexMatrix) -> f64 {
        Self::scaled(self.mat_eq, m.dim(), &[m.frobenius_norm(), n.frobenius_norm()])
    }

    /// Scaled Frobenius equality. Panics on a dimension mismatch.
    pub fn approx_eq(&self, m: &ComplexMatrix, n: &ComplexMatrix) -> bool {
        assert_eq!(m.dim(), n.dim(), "dimension mismatch");
        m.distance_unchecked(n) <= self.eq_threshold(m, n)
    }
}
