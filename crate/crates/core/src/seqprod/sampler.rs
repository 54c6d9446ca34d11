use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use super::{sequential_product_matrix, PhaseFamily};
use crate::quantum::{DensityOperator, Povm};
use crate::rng::substream;
use crate::{Error, Result};

/// Outcome counts of repeated "measure X, then Y" runs next to the exact
/// joint distribution `p(k, j) = tr((A_k ⋄ B_j) W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcomeTable {
    pub counts: Vec<Vec<u64>>,
    pub exact: Vec<Vec<f64>>,
    pub total: u64,
}

impl MeasurementOutcomeTable {
    /// Per-cell binomial z-score `(n − N p) / sqrt(N p (1 − p))`. Cells with a
    /// degenerate probability score 0 when the count matches and infinity
    /// otherwise.
    pub fn z_scores(&self) -> Vec<Vec<f64>> {
        let n = self.total as f64;
        self.counts
            .iter()
            .zip(&self.exact)
            .map(|(cr, pr)| {
                cr.iter()
                    .zip(pr)
                    .map(|(&c, &p)| {
                        let var = n * p * (1.0 - p);
                        let dev = c as f64 - n * p;
                        if var > 0.0 {
                            dev / var.sqrt()
                        } else if dev.abs() < 0.5 {
                            0.0
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn max_abs_z(&self) -> f64 {
        self.z_scores()
            .iter()
            .flatten()
            .fold(0.0_f64, |m, z| m.max(z.abs()))
    }
}

/// Joint distribution of X followed by Y. Roundoff negatives are clamped to 0.
pub fn exact_grid(fam: &PhaseFamily, w: &DensityOperator, x: &Povm, y: &Povm) -> Result<Vec<Vec<f64>>> {
    for d in [x.dim(), y.dim()] {
        if d != w.dim() {
            return Err(Error::DimensionMismatch { left: w.dim(), right: d });
        }
    }
    x.elements()
        .iter()
        .map(|a| {
            y.elements()
                .iter()
                .map(|b| {
                    let ab = sequential_product_matrix(fam, a, b.matrix())?;
                    Ok(ab.trace_product(w.matrix()).re.max(0.0))
                })
                .collect()
        })
        .collect()
}

pub fn sample_sequential(
    fam: &PhaseFamily,
    w: &DensityOperator,
    x: &Povm,
    y: &Povm,
    trials: u64,
    seed: u64,
) -> Result<MeasurementOutcomeTable> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let exact = exact_grid(fam, w, x, y)?;
    let n = y.len();
    let flat: Vec<f64> = exact.iter().flatten().copied().collect();
    let dist = WeightedIndex::new(&flat).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = substream(seed, 0);
    let mut counts = vec![vec![0u64; n]; x.len()];
    for _ in 0..trials {
        let cell = dist.sample(&mut rng);
        counts[cell / n][cell % n] += 1;
    }
    Ok(MeasurementOutcomeTable {
        counts,
        exact,
        total: trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{ComplexMatrix, Tolerances};
    use crate::quantum::{random_density, random_povm, validate_density, validate_povm};
    use crate::seqprod::probability;

    fn diag_povm(rows: &[&[f64]]) -> Povm {
        let mats: Vec<ComplexMatrix> = rows.iter().map(|r| ComplexMatrix::from_real_diagonal(r).unwrap()).collect();
        validate_povm(&mats, &Tolerances::default()).unwrap()
    }

    #[test]
    fn exact_grid_marginals() {
        let fam = PhaseFamily::new(0.7, 0.4);
        let w = random_density(3, 1).unwrap();
        let x = random_povm(3, 3, 2).unwrap();
        let y = random_povm(3, 2, 3).unwrap();
        let grid = exact_grid(&fam, &w, &x, &y).unwrap();
        let total: f64 = grid.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (row, a) in grid.iter().zip(x.elements()) {
            let p = probability(&fam, &w, a).unwrap();
            assert!((row.iter().sum::<f64>() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_closed_form() {
        let x = diag_povm(&[&[0.2, 0.7], &[0.8, 0.3]]);
        let y = diag_povm(&[&[0.5, 0.1], &[0.5, 0.9]]);
        let w = validate_density(&ComplexMatrix::from_real_diagonal(&[0.6, 0.4]).unwrap(), &Tolerances::default())
            .unwrap();
        let grid = exact_grid(&PhaseFamily::new(2.5, 1.0), &w, &x, &y).unwrap();
        let a = [[0.2, 0.7], [0.8, 0.3]];
        let b = [[0.5, 0.1], [0.5, 0.9]];
        let ws = [0.6, 0.4];
        for k in 0..2 {
            for j in 0..2 {
                let expected: f64 = (0..2).map(|i| a[k][i] * b[j][i] * ws[i]).sum();
                assert!((grid[k][j] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_counts_sum() {
        let fam = PhaseFamily::default();
        let w = random_density(2, 5).unwrap();
        let x = random_povm(2, 2, 6).unwrap();
        let y = random_povm(2, 3, 7).unwrap();
        let t1 = sample_sequential(&fam, &w, &x, &y, 1000, 9).unwrap();
        let t2 = sample_sequential(&fam, &w, &x, &y, 1000, 9).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.counts.iter().flatten().sum::<u64>(), 1000);
        let one = sample_sequential(&fam, &w, &x, &y, 1, 9).unwrap();
        assert_eq!(one.counts.iter().flatten().sum::<u64>(), 1);
        assert!(sample_sequential(&fam, &w, &x, &y, 0, 9).is_err());
    }

    #[test]
    fn degenerate_cells_score_zero() {
        let table = MeasurementOutcomeTable {
            counts: vec![vec![10, 0]],
            exact: vec![vec![1.0, 0.0]],
            total: 10,
        };
        assert_eq!(table.max_abs_z(), 0.0);
        let bad = MeasurementOutcomeTable {
            counts: vec![vec![9, 1]],
            exact: vec![vec![1.0, 0.0]],
            total: 10,
        };
        assert!(bad.max_abs_z().is_infinite());
    }
}
