use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::partition::{MAX_DIM, MIN_DIM};

/// Rank tolerance for re-orthonormalization.
pub const RANK_TOL: f64 = 1e-6;

/// An orthonormal basis of `R^n`, stored as the rows of an orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    rows: DMatrix<f64>,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        Self {
            rows: DMatrix::identity(n, n),
        }
    }

    /// Re-orthonormalizes `m` row by row with modified Gram-Schmidt.
    pub fn from_matrix(mut m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if let Some(v) = m.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        for i in 0..n {
            for j in 0..i {
                let d = m.row(i).dot(&m.row(j));
                let rj = m.row(j).clone_owned();
                let mut ri = m.row_mut(i);
                ri -= d * rj;
            }
            let norm = m.row(i).norm();
            if norm < RANK_TOL {
                return Err(Error::RankDeficientFrame {
                    row: i + 1,
                    residual: norm,
                });
            }
            let mut ri = m.row_mut(i);
            ri /= norm;
        }
        Ok(Self { rows: m })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_matrix(DMatrix::from_row_slice(n, n, &flat))
    }

    /// Frame whose row `i` is the coordinate vector `e_{order[i]}` (0-based).
    pub fn permutation(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut m = DMatrix::zeros(n, n);
        let mut used = vec![false; n];
        for (i, &j) in order.iter().enumerate() {
            if j >= n || used[j] {
                return Err(Error::Format(format!("not a permutation: {order:?}")));
            }
            used[j] = true;
            m[(i, j)] = 1.0;
        }
        Self::from_matrix(m)
    }

    /// Haar-distributed orthogonal frame (Gram-Schmidt on a Gaussian matrix).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let m = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            if let Ok(f) = Self::from_matrix(m) {
                return f;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.rows.row(i).iter().copied().collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.rows.transpose(),
        }
    }

    /// `Q * R`: rows of the result are the rows of `self` recombined by `q`.
    pub fn left_mul(&self, q: &DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(q * &self.rows)
    }

    /// `max |R R^T - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n();
        let p = &self.rows * self.rows.transpose();
        (p - DMatrix::<f64>::identity(n, n)).amax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reorthonormalizes_drift() {
        let f = Frame::from_rows(vec![vec![1.0, 1e-7], vec![0.0, 1.0 + 1e-7]]).unwrap();
        assert!(f.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn rejects_rank_deficient() {
        let err = Frame::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-9]]).unwrap_err();
        assert!(matches!(err, Error::RankDeficientFrame { row: 2, .. }));
    }

    #[test]
    fn random_frames_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=12 {
            let f = Frame::random(n, &mut rng);
            assert!(f.orthogonality_defect() < 1e-12);
        }
    }

    #[test]
    fn permutation_frame() {
        let f = Frame::permutation(&[2, 0, 1]).unwrap();
        assert_eq!(f.row(0), vec![0.0, 0.0, 1.0]);
        assert!(Frame::permutation(&[0, 0, 1]).is_err());
    }
}
