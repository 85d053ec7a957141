//! Just enough dense linear algebra for k×k normal equations (k ≤ ~10).

use crate::error::{Error, Result};

/// Relative pivot tolerance of the Cholesky factorization.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Vec<Vec<f64>>,
}

impl Cholesky {
    /// Fails with [`Error::RankDeficient`] when a pivot drops below
    /// `RANK_TOLERANCE · max diagonal`.
    pub fn new(a: &[Vec<f64>]) -> Result<Self> {
        let k = a.len();
        let max_diag = (0..k).map(|i| a[i][i]).fold(0.0, f64::max);
        if !(max_diag > 0.0) || !max_diag.is_finite() {
            return Err(Error::RankDeficient);
        }
        let tol = RANK_TOLERANCE * max_diag;
        let mut l = vec![vec![0.0; k]; k];
        for j in 0..k {
            let d = a[j][j] - l[j][..j].iter().map(|v| v * v).sum::<f64>();
            if !(d > tol) {
                return Err(Error::RankDeficient);
            }
            let pivot = d.sqrt();
            l[j][j] = pivot;
            for i in (j + 1)..k {
                let s = a[i][j] - (0..j).map(|m| l[i][m] * l[j][m]).sum::<f64>();
                l[i][j] = s / pivot;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = self.l.len();
        let mut z = vec![0.0; k];
        for i in 0..k {
            let s = b[i] - (0..i).map(|m| self.l[i][m] * z[m]).sum::<f64>();
            z[i] = s / self.l[i][i];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s = z[i] - ((i + 1)..k).map(|m| self.l[m][i] * x[m]).sum::<f64>();
            x[i] = s / self.l[i][i];
        }
        x
    }

    /// The inverse, symmetrized.
    pub fn inverse(&self) -> Vec<Vec<f64>> {
        let k = self.l.len();
        let mut inv = vec![vec![0.0; k]; k];
        for j in 0..k {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..k {
                inv[i][j] = col[i];
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let m = 0.5 * (inv[i][j] + inv[j][i]);
                inv[i][j] = m;
                inv[j][i] = m;
            }
        }
        inv
    }
}
