//! Intrinsic curvature of a Lagrangian submanifold from its cubic form,
//! through the Gauss equation in a complex space form of holomorphic
//! sectional curvature `4c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CubicForm, DenseCubic};

/// One quarter of the ambient holomorphic sectional curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientConstant(f64);

impl AmbientConstant {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite(c));
        }
        Ok(Self(c))
    }

    /// The flat case `C^n`.
    pub const FLAT: AmbientConstant = AmbientConstant(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `|H|^2 = (1/n^2) sum_C (sum_A h_{AAC})^2`.
pub fn mean_curvature_sq(h: &CubicForm) -> f64 {
    let n = h.n();
    let total: f64 = (0..n)
        .map(|c| {
            let tr: f64 = (0..n).map(|a| h.get(a, a, c)).sum();
            tr * tr
        })
        .sum();
    total / (n * n) as f64
}

/// `K(e_i ^ e_j) = c + sum_C (h_{iiC} h_{jjC} - h_{ijC}^2)` for 0-based `i != j`.
pub fn sectional_curvature(h: &CubicForm, c: AmbientConstant, i: usize, j: usize) -> Result<f64> {
    let n = h.n();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx + 1, n });
        }
    }
    if i == j {
        return Err(Error::EqualIndices(i + 1));
    }
    Ok(c.value() + gauss_pair(n, |a, b, cc| h.get(a, b, cc), i, j))
}

#[inline]
fn gauss_pair(n: usize, t: impl Fn(usize, usize, usize) -> f64, i: usize, j: usize) -> f64 {
    (0..n)
        .map(|cc| t(i, i, cc) * t(j, j, cc) - t(i, j, cc).powi(2))
        .sum()
}

/// `tau(L)` for the coordinate subspace spanned by the 0-based indices `idx`.
/// Sets with fewer than two elements give 0.
pub fn tau_subspace(h: &CubicForm, c: AmbientConstant, idx: &[usize]) -> Result<f64> {
    let n = h.n();
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad + 1, n });
    }
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::EqualIndices(w[0] + 1));
    }
    let mut total = 0.0;
    for (p, &i) in sorted.iter().enumerate() {
        for &j in &sorted[p + 1..] {
            total += c.value() + gauss_pair(n, |a, b, cc| h.get(a, b, cc), i, j);
        }
    }
    Ok(total)
}

/// Scalar curvature `tau` of the whole tangent space.
pub fn scalar_curvature(h: &CubicForm, c: AmbientConstant) -> f64 {
    let all: Vec<usize> = (0..h.n()).collect();
    tau_subspace(h, c, &all).expect("full index set is valid")
}

/// Pairwise Gauss sums `K_ij - c` on a dense tensor, row-major `n x n`
/// with zero diagonal.
pub(crate) fn pair_table(t: &DenseCubic) -> Vec<f64> {
    let n = t.n();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = gauss_pair(n, |a, b, cc| t.at(a, b, cc), i, j);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    out
}

/// Sum of `K_ij - c` over pairs inside `set`.
pub(crate) fn table_tau(table: &[f64], n: usize, set: &[usize]) -> f64 {
    let mut s = 0.0;
    for (p, &i) in set.iter().enumerate() {
        for &j in &set[p + 1..] {
            s += table[i * n + j];
        }
    }
    s
}

pub(crate) fn pairs(m: usize) -> f64 {
    (m * m.saturating_sub(1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equality_n3() -> CubicForm {
        // h_333 = 2, h_113 = h_223 = 1/2
        CubicForm::symmetrize(3, [([3, 3, 3], 2.0), ([1, 1, 3], 0.5), ([2, 2, 3], 0.5)]).unwrap()
    }

    #[test]
    fn mean_curvature_examples() {
        assert_eq!(mean_curvature_sq(&CubicForm::zeros(4).unwrap()), 0.0);
        let h = CubicForm::symmetrize(2, [([1, 1, 1], 2.0)]).unwrap();
        assert_eq!(mean_curvature_sq(&h), 1.0);
        assert!((mean_curvature_sq(&equality_n3()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sectional_examples() {
        let z = CubicForm::zeros(3).unwrap();
        let c = AmbientConstant::new(0.7).unwrap();
        assert_eq!(sectional_curvature(&z, c, 0, 2).unwrap(), 0.7);
        let h = equality_n3();
        let flat = AmbientConstant::FLAT;
        assert!((sectional_curvature(&h, flat, 0, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((sectional_curvature(&h, flat, 0, 2).unwrap() - 0.75).abs() < 1e-15);
        assert!((sectional_curvature(&h, flat, 1, 2).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(
            sectional_curvature(&h, flat, 1, 1),
            Err(Error::EqualIndices(2))
        );
        assert!(matches!(
            sectional_curvature(&h, flat, 0, 3),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
    }

    #[test]
    fn tau_examples() {
        let c = AmbientConstant::new(1.5).unwrap();
        let z = CubicForm::zeros(5).unwrap();
        for m in 0..=5 {
            let idx: Vec<usize> = (0..m).collect();
            let want = (m * m.saturating_sub(1) / 2) as f64 * 1.5;
            assert_eq!(tau_subspace(&z, c, &idx).unwrap(), want);
        }
        let h = equality_n3();
        let flat = AmbientConstant::FLAT;
        assert!((tau_subspace(&h, flat, &[0, 1]).unwrap() - 0.25).abs() < 1e-15);
        assert!((tau_subspace(&h, flat, &[0, 1, 2]).unwrap() - 1.75).abs() < 1e-15);
        assert!((scalar_curvature(&h, flat) - 1.75).abs() < 1e-15);
        assert!(tau_subspace(&h, flat, &[0, 0]).is_err());
    }
}
