//! The quadratic forms behind the optimal coefficients.
//!
//! For a block `ell` and a coefficient `C`, [`build_m`] assembles twice the
//! matrix of the form in the diagonal components `x_A = h^{gamma}_{AA}`,
//! `gamma` in block `ell`. Its difference vectors inside each block are
//! eigenvectors (eigenvalue 0 on `ell`, 3 on the residual block, 2 on the
//! others); the remaining behaviour lives on the block-average vectors
//! `v_i` and is captured by the reduced matrix `M'`. Positive
//! semidefiniteness is decided twice: by a dense symmetric eigensolve and by
//! the sign pattern of the leading minors of `M'`.
//!
//! Block indices and coordinates are 0-based; the residual block (when
//! nonempty) comes last.

mod lemma2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::inequality::optimal_bound;
use crate::partition::PartitionSpec;
use crate::rational::{frac, int, to_f64, Rational};

pub use lemma2::{constant_offdiag_minors, det_closed, det_recursive};

/// Eigenvalues above `-EIG_TOL` count as nonnegative.
pub const EIG_TOL: f64 = 1e-10;
/// Float-route leading minors above `-MINOR_TOL` count as nonnegative.
pub const MINOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdCase {
    /// Form (I): `gamma` in block `ell`.
    StatementI,
    /// Form (II): `gamma` in the residual block.
    StatementII,
    /// Form (I) when the blocks fill the space.
    Theorem2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormBundle {
    pub partition: PartitionSpec,
    pub ell: usize,
    pub c: f64,
    /// Set when `c` was supplied as a rational; minors are then exact.
    pub c_exact: Option<Rational>,
    pub m: DMatrix<f64>,
    pub m_reduced: DMatrix<f64>,
    /// Leading principal minors of `m_reduced`.
    pub minors: Vec<f64>,
    /// Smallest `C` making this block's form (I) nonnegative.
    pub critical_c: f64,
}

fn check_ell(p: &PartitionSpec, ell: usize) -> Result<()> {
    if ell >= p.k() {
        return Err(Error::BadBlockIndex {
            ell: ell + 1,
            k: p.k(),
        });
    }
    Ok(())
}

/// Number of blocks of `M'`: `k + 1`, or `k` without residual block.
fn reduced_dim(p: &PartitionSpec) -> usize {
    if p.is_full() {
        p.k()
    } else {
        p.k() + 1
    }
}

/// The `n x n` matrix `M_ell` at coefficient `c`.
pub fn matrix_m(p: &PartitionSpec, ell: usize, c: f64) -> Result<DMatrix<f64>> {
    check_ell(p, ell)?;
    let k = p.k();
    let blk = p.block_of();
    let n = p.n();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let (i, j) = (blk[a], blk[b]);
        if i != j {
            2.0 * c - 1.0
        } else if i == ell {
            2.0 * c
        } else if a == b {
            2.0 * (c + 1.0)
        } else if i == k {
            2.0 * c - 1.0
        } else {
            2.0 * c
        }
    }))
}

/// The matrix of form (II) for a distinguished index `t` of the residual
/// block: same recipe with the residual block in the distinguished role at
/// position `t` only (diagonal `2C` at `t`, `2(C+1)` elsewhere).
pub fn matrix_statement2(p: &PartitionSpec, t: usize, c: f64) -> Result<DMatrix<f64>> {
    let k = p.k();
    let blk = p.block_of();
    if t >= p.n() || blk[t] != k {
        return Err(Error::CaseMismatch(format!(
            "index {} is not in the residual block",
            t + 1
        )));
    }
    let n = p.n();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let (i, j) = (blk[a], blk[b]);
        if i != j {
            2.0 * c - 1.0
        } else if a == b {
            if a == t {
                2.0 * c
            } else {
                2.0 * (c + 1.0)
            }
        } else if i == k {
            2.0 * c - 1.0
        } else {
            2.0 * c
        }
    }))
}

/// Rows `v_i = (1/n_i) 1_{Delta_i}` for the nonempty blocks.
pub fn block_average_vectors(p: &PartitionSpec) -> DMatrix<f64> {
    let ranges: Vec<_> = p.ranges().into_iter().filter(|r| !r.is_empty()).collect();
    let mut v = DMatrix::zeros(ranges.len(), p.n());
    for (i, r) in ranges.iter().enumerate() {
        let w = 1.0 / r.len() as f64;
        for a in r.clone() {
            v[(i, a)] = w;
        }
    }
    v
}

/// Difference vectors `e_first - e_other` inside each block, tagged with
/// their block index.
pub fn difference_vectors(p: &PartitionSpec) -> Vec<(usize, DVector<f64>)> {
    let mut out = Vec::new();
    for (i, r) in p.ranges().into_iter().enumerate() {
        for other in r.clone().skip(1) {
            let mut v = DVector::zeros(p.n());
            v[r.start] = 1.0;
            v[other] = -1.0;
            out.push((i, v));
        }
    }
    out
}

/// Eigenvalue of `M_ell` on the difference vectors of `block`.
pub fn difference_eigenvalue(p: &PartitionSpec, ell: usize, block: usize) -> f64 {
    if block == ell {
        0.0
    } else if block == p.k() {
        3.0
    } else {
        2.0
    }
}

/// Diagonal of `M'` (generic so the minors can be exact).
fn reduced_diagonal<T>(p: &PartitionSpec, ell: usize, c: &T, from_frac: impl Fn(i64, i64) -> T) -> Vec<T>
where
    T: num_traits::Num + Clone,
{
    let two = from_frac(2, 1);
    let mut d: Vec<T> = p
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, &ni)| {
            if i == ell {
                two.clone() * c.clone()
            } else {
                two.clone() * (c.clone() + from_frac(1, ni as i64))
            }
        })
        .collect();
    if !p.is_full() {
        d.push(two * c.clone() - T::one() + from_frac(3, p.residual() as i64));
    }
    d
}

/// `M'` from the closed-form entries.
pub fn reduce_m(p: &PartitionSpec, ell: usize, c: f64) -> Result<DMatrix<f64>> {
    check_ell(p, ell)?;
    let d = reduced_diagonal(p, ell, &c, |a, b| a as f64 / b as f64);
    let m = reduced_dim(p);
    Ok(DMatrix::from_fn(m, m, |i, j| if i == j { d[i] } else { 2.0 * c - 1.0 }))
}

/// Leading principal minors of `M'` in floating point.
pub fn reduced_minors(p: &PartitionSpec, ell: usize, c: f64) -> Result<Vec<f64>> {
    check_ell(p, ell)?;
    let d = reduced_diagonal(p, ell, &c, |a, b| a as f64 / b as f64);
    Ok(constant_offdiag_minors(&d, &(2.0 * c - 1.0)))
}

/// Leading principal minors of `M'` in exact arithmetic.
pub fn reduced_minors_exact(p: &PartitionSpec, ell: usize, c: Rational) -> Result<Vec<Rational>> {
    check_ell(p, ell)?;
    let d = reduced_diagonal(p, ell, &c, frac);
    Ok(constant_offdiag_minors(&d, &(int(2) * c - int(1))))
}

/// Left-hand sides `E_j` of the sign conditions for `2C < 1`: the form is
/// nonnegative iff every `E_j <= 0`. One entry per block of `M'`.
pub fn sign_conditions(p: &PartitionSpec, ell: usize, c: Rational) -> Result<Vec<Rational>> {
    check_ell(p, ell)?;
    let q = int(2) * c - int(1);
    if q.is_zero() {
        return Err(Error::CaseMismatch("sign conditions need 2C != 1".into()));
    }
    let mut out = Vec::new();
    let mut acc = int(0);
    for (j, &nj) in p.blocks().iter().enumerate() {
        if j != ell {
            acc += frac(nj as i64, nj as i64 + 2);
        }
        let lead = if j >= ell { int(2) * c / q } else { int(1) / q };
        out.push(lead + acc);
    }
    if !p.is_full() {
        out.push(int(2) * c / q + frac(p.residual() as i64, 3) + acc);
    }
    Ok(out)
}

pub fn build_m(p: &PartitionSpec, ell: usize, c: f64) -> Result<QuadraticFormBundle> {
    Ok(QuadraticFormBundle {
        partition: p.clone(),
        ell,
        c,
        c_exact: None,
        m: matrix_m(p, ell, c)?,
        m_reduced: reduce_m(p, ell, c)?,
        minors: reduced_minors(p, ell, c)?,
        critical_c: to_f64(&critical_c_exact(p, ell, own_case(p))?),
    })
}

pub fn build_m_exact(p: &PartitionSpec, ell: usize, c: Rational) -> Result<QuadraticFormBundle> {
    let cf = to_f64(&c);
    let mut b = build_m(p, ell, cf)?;
    b.c_exact = Some(c);
    b.minors = reduced_minors_exact(p, ell, c)?.iter().map(to_f64).collect();
    Ok(b)
}

fn own_case(p: &PartitionSpec) -> ThresholdCase {
    if p.is_full() {
        ThresholdCase::Theorem2
    } else {
        ThresholdCase::StatementI
    }
}

/// Exact threshold `C*`:
/// - `StatementI`: `2C >= (r + 3k - 3 - 6S) / (r + 3k - 6S)`, `S = sum_{i != ell} 1/(n_i+2)`,
///   `r` the residual size;
/// - `StatementII`: `2C >= (r + 3k - 1 - 6T) / (r + 3k + 2 - 6T)`, `T = sum_i 1/(n_i+2)`;
/// - `Theorem2`: `2C >= (k - 1 - 2S) / (k - 2S)`, which is the `StatementI` value at
///   `r = 0`; it is largest when `n_ell` is minimal.
pub fn critical_c_exact(p: &PartitionSpec, ell: usize, case: ThresholdCase) -> Result<Rational> {
    check_ell(p, ell)?;
    let r = int(p.residual() as i64);
    let k = int(p.k() as i64);
    let two_c = match case {
        ThresholdCase::StatementI => {
            let s = int(6) * p.inverse_sum_except(ell);
            (r + int(3) * k - int(3) - s) / (r + int(3) * k - s)
        }
        ThresholdCase::StatementII => {
            if p.is_full() {
                return Err(Error::CaseMismatch(
                    "form (II) needs a nonempty residual block".into(),
                ));
            }
            let t = int(6) * p.inverse_sum();
            (r + int(3) * k - int(1) - t) / (r + int(3) * k + int(2) - t)
        }
        ThresholdCase::Theorem2 => {
            if !p.is_full() {
                return Err(Error::CaseMismatch(
                    "this case needs block sizes summing to n".into(),
                ));
            }
            let s = int(2) * p.inverse_sum_except(ell);
            (k - int(1) - s) / (k - s)
        }
    };
    Ok(two_c / int(2))
}

pub fn critical_c(p: &PartitionSpec, ell: usize, case: ThresholdCase) -> Result<f64> {
    critical_c_exact(p, ell, case).map(|c| to_f64(&c))
}

/// The optimal `C`, i.e. the inequality coefficient divided by `n^2`.
pub fn optimal_c(p: &PartitionSpec) -> Rational {
    let n = p.n() as i64;
    optimal_bound(p).a / int(n * n)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdVerdict {
    /// Dense eigensolve: `min_eigenvalue >= -EIG_TOL`.
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Leading-minor sign route on the reduced matrix.
    pub sylvester_psd: bool,
}

pub fn psd_verdict(bundle: &QuadraticFormBundle) -> PsdVerdict {
    let min_eigenvalue = min_eigenvalue(&bundle.m);
    let sylvester_psd = match bundle.c_exact {
        Some(c) => {
            if int(2) * c >= int(1) {
                true
            } else {
                reduced_minors_exact(&bundle.partition, bundle.ell, c)
                    .expect("bundle block index is valid")
                    .iter()
                    .all(|m| *m >= int(0))
            }
        }
        None => 2.0 * bundle.c >= 1.0 || bundle.minors.iter().all(|m| *m >= -MINOR_TOL),
    };
    PsdVerdict {
        psd: min_eigenvalue >= -EIG_TOL,
        min_eigenvalue,
        sylvester_psd,
    }
}

/// Solution `(a_1, ..., a_k)` with `a_ell = 1` of `M_ell (sum a_i v_i) = 0`
/// at the optimal `C`, when the blocks fill the space. The system is
/// `s (2C - 1) + a_i (1 + 2/n_i) = 0` for `i != ell` and `s (2C - 1) + a_ell = 0`
/// with `s = sum a_j`; it has a nonzero solution exactly when `n_ell` is a
/// smallest block.
pub fn kernel_solution_theorem2(p: &PartitionSpec, ell: usize) -> Result<Option<Vec<Rational>>> {
    check_ell(p, ell)?;
    if !p.is_full() {
        return Err(Error::CaseMismatch(
            "kernel system needs block sizes summing to n".into(),
        ));
    }
    let c = optimal_c(p);
    let a: Vec<Rational> = p
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, &ni)| {
            if i == ell {
                Rational::one()
            } else {
                frac(ni as i64, ni as i64 + 2)
            }
        })
        .collect();
    let s: Rational = a.iter().copied().fold(int(0), |x, y| x + y);
    let consistent = (s * (int(2) * c - int(1)) + int(1)).is_zero();
    Ok(consistent.then_some(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, b: &[usize]) -> PartitionSpec {
        PartitionSpec::new(n, b.to_vec()).unwrap()
    }

    #[test]
    fn m_example() {
        let m = matrix_m(&p(3, &[2]), 0, 1.0 / 6.0).unwrap();
        let want = [
            [1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0],
            [1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0],
            [-2.0 / 3.0, -2.0 / 3.0, 7.0 / 3.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[(i, j)] - want[i][j]).abs() < 1e-15);
            }
        }
        assert!(matches!(
            matrix_m(&p(3, &[2]), 1, 0.1),
            Err(Error::BadBlockIndex { ell: 2, k: 1 })
        ));
    }

    #[test]
    fn reduced_example() {
        let r = reduce_m(&p(3, &[2]), 0, 1.0 / 6.0).unwrap();
        assert_eq!(r.shape(), (2, 2));
        assert!((r[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r[(1, 1)] - 7.0 / 3.0).abs() < 1e-15);
        assert!((r[(0, 1)] + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(reduce_m(&p(4, &[2, 2]), 0, 0.2).unwrap().shape(), (2, 2));
    }

    #[test]
    fn thresholds() {
        let c = critical_c_exact(&p(3, &[2]), 0, ThresholdCase::StatementII).unwrap();
        assert_eq!(c, frac(1, 6));
        assert_eq!(c * int(9), frac(3, 2));
        let c = critical_c_exact(&p(4, &[2, 2]), 0, ThresholdCase::Theorem2).unwrap();
        assert_eq!(c, frac(1, 6));
        assert_eq!(c * int(16), frac(8, 3));
        assert!(matches!(
            critical_c_exact(&p(4, &[2, 2]), 0, ThresholdCase::StatementII),
            Err(Error::CaseMismatch(_))
        ));
        assert!(matches!(
            critical_c_exact(&p(4, &[2]), 0, ThresholdCase::Theorem2),
            Err(Error::CaseMismatch(_))
        ));
    }

    #[test]
    fn case_one_is_definite() {
        for n in 3..=7 {
            for part in PartitionSpec::enumerate_all(n) {
                for ell in 0..part.k() {
                    let b = build_m_exact(&part, ell, frac(1, 2)).unwrap();
                    let v = psd_verdict(&b);
                    assert!(v.psd && v.sylvester_psd, "{part} ell={ell}");
                    assert!(b.m_reduced.clone().cholesky().is_some());
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(
            kernel_solution_theorem2(&p(4, &[2, 2]), 0).unwrap(),
            Some(vec![int(1), frac(1, 2)])
        );
        assert_eq!(kernel_solution_theorem2(&p(5, &[2, 3]), 1).unwrap(), None);
        assert_eq!(
            kernel_solution_theorem2(&p(5, &[2, 3]), 0).unwrap(),
            Some(vec![int(1), frac(3, 5)])
        );
        assert!(kernel_solution_theorem2(&p(5, &[2, 2]), 0).is_err());
    }
}
