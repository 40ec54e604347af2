//! Gradient-graph Lagrangian immersions `x -> x + i grad f(x)` into `C^n`
//! for a cubic potential `f`, and numerical recovery of their second
//! fundamental form from the induced metric.
//!
//! Points of `C^n` are stored in `R^{2n}` as `(re_1..re_n, im_1..im_n)` and
//! `J(u, v) = (-v, u)`.

mod polynomial;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::frac;
use crate::tensor::{multiplicity, CubicForm};

pub use polynomial::{Polynomial, Term};

/// Metrics with condition number at or above this are rejected.
pub const MAX_CONDITION: f64 = 1e6;
/// Step for the optional finite-difference cross-check.
pub const FD_STEP: f64 = 1e-4;

/// `f(x) = 1/6 sum_{A,B,C} a_ABC x_A x_B x_C` with its partials up to order 3.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicPotential {
    n: usize,
    f: Polynomial,
    grad: Vec<Polynomial>,
    hess: Vec<Vec<Polynomial>>,
    third: Vec<f64>,
}

pub fn potential_from_tensor(a: &CubicForm) -> CubicPotential {
    let n = a.n();
    let mut f = Polynomial::zero(n);
    for ([p, q, r], v) in a.iter_canonical() {
        let mut e = vec![0u32; n];
        e[p] += 1;
        e[q] += 1;
        e[r] += 1;
        f.push(e, frac(multiplicity(p, q, r) as i64, 6), v);
    }
    let grad: Vec<Polynomial> = (0..n).map(|j| f.derivative(j)).collect();
    let hess: Vec<Vec<Polynomial>> = grad
        .iter()
        .map(|g| (0..n).map(|j| g.derivative(j)).collect())
        .collect();
    let mut third = vec![0.0; n * n * n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                third[(x * n + y) * n + z] = hess[x][y]
                    .derivative(z)
                    .constant()
                    .expect("third partials of a cubic are constant");
            }
        }
    }
    CubicPotential {
        n,
        f,
        grad,
        hess,
        third,
    }
}

impl CubicPotential {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.f
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.f.eval(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.hess[i][j].eval(x))
    }

    /// `f_{x_A x_B x_C}`, 0-based.
    pub fn third_partial(&self, a: usize, b: usize, c: usize) -> f64 {
        self.third[(a * self.n + b) * self.n + c]
    }

    /// `F(x) = (x, grad f(x))`.
    pub fn embed(&self, x: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.n);
        for (i, &xi) in x.iter().enumerate() {
            out[i] = xi;
        }
        for (i, gi) in self.gradient(x).into_iter().enumerate() {
            out[self.n + i] = gi;
        }
        out
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        Ok(())
    }
}

pub fn complex_structure(v: &DVector<f64>) -> DVector<f64> {
    let n = v.len() / 2;
    DVector::from_fn(2 * n, |i, _| if i < n { -v[n + i] } else { v[i - n] })
}

/// Exact first and second derivatives of `F` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionPoint {
    pub x: Vec<f64>,
    pub position: DVector<f64>,
    /// `tangent[A] = F_* e_A = (e_A, Hess f e_A)`.
    pub tangent: Vec<DVector<f64>>,
    /// `second[A][B] = d^2 F / dx_A dx_B = (0, f_{. A B})`.
    pub second: Vec<Vec<DVector<f64>>>,
    /// `g_AB = delta_AB + (Hess f Hess f)_AB`.
    pub metric: DMatrix<f64>,
}

pub fn immersion_point(f: &CubicPotential, x: &[f64]) -> Result<ImmersionPoint> {
    f.check_point(x)?;
    let n = f.n;
    let hess = f.hessian(x);
    let tangent: Vec<DVector<f64>> = (0..n)
        .map(|a| {
            let mut v = DVector::zeros(2 * n);
            v[a] = 1.0;
            for j in 0..n {
                v[n + j] = hess[(j, a)];
            }
            v
        })
        .collect();
    let second = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut v = DVector::zeros(2 * n);
                    for j in 0..n {
                        v[n + j] = f.third_partial(j, a, b);
                    }
                    v
                })
                .collect()
        })
        .collect();
    let metric = DMatrix::identity(n, n) + &hess * &hess;
    Ok(ImmersionPoint {
        x: x.to_vec(),
        position: f.embed(x),
        tangent,
        second,
        metric,
    })
}

/// Dense `n^3` array of components `<h(e_A, e_B), J F_* e_C>` in the
/// coordinate frame, which is orthonormal only where `Hess f = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentArray {
    n: usize,
    data: Vec<f64>,
}

impl ComponentArray {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &ComponentArray) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// `max |self_ABC - third partial f_ABC|`.
    pub fn max_diff_potential(&self, f: &CubicPotential) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    m = m.max((self.at(a, b, c) - f.third_partial(a, b, c)).abs());
                }
            }
        }
        m
    }

    /// `max |self_ABC - a_ABC|` over all ordered triples.
    pub fn max_diff_tensor(&self, a: &CubicForm) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    m = m.max((self.at(x, y, z) - a.get(x, y, z)).abs());
                }
            }
        }
        m
    }

    /// Symmetrized copy as a [`CubicForm`].
    pub fn to_cubic_form(&self) -> CubicForm {
        let n = self.n;
        let mut h = CubicForm::zeros(n).expect("dimension validated by the potential");
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let perms = [
                        (a, b, c),
                        (a, c, b),
                        (b, a, c),
                        (b, c, a),
                        (c, a, b),
                        (c, b, a),
                    ];
                    let s: f64 = perms.iter().map(|&(x, y, z)| self.at(x, y, z)).sum();
                    h.set(a, b, c, s / 6.0);
                }
            }
        }
        h
    }
}

fn condition_number(g: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(g.clone()).eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Second fundamental form from first and second derivatives of an
/// immersion. The metric and its derivatives are formed from the given
/// vectors: `d_C g_AB = <F_AC, F_B> + <F_A, F_BC>`.
pub fn second_fundamental_form_from(
    tangent: &[DVector<f64>],
    second: &[Vec<DVector<f64>>],
) -> Result<ComponentArray> {
    let n = tangent.len();
    let g = DMatrix::from_fn(n, n, |a, b| tangent[a].dot(&tangent[b]));
    let cond = condition_number(&g);
    if cond.is_nan() || cond >= MAX_CONDITION {
        return Err(Error::SingularMetric(cond));
    }
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or(Error::SingularMetric(f64::INFINITY))?;
    // dg[c][(a, b)] = d_C g_AB
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|c| {
            DMatrix::from_fn(n, n, |a, b| {
                second[a][c].dot(&tangent[b]) + tangent[a].dot(&second[b][c])
            })
        })
        .collect();
    let normals: Vec<DVector<f64>> = tangent.iter().map(complex_structure).collect();
    let mut data = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            // lowered Christoffel symbols Gamma_{AB,D}
            let lowered = DVector::from_fn(n, |d, _| {
                0.5 * (dg[a][(b, d)] + dg[b][(a, d)] - dg[d][(a, b)])
            });
            let gamma = &ginv * lowered;
            let mut normal_part = second[a][b].clone();
            for (e, t) in tangent.iter().enumerate() {
                normal_part.axpy(-gamma[e], t, 1.0);
            }
            for (c, jc) in normals.iter().enumerate() {
                data[(a * n + b) * n + c] = normal_part.dot(jc);
            }
        }
    }
    Ok(ComponentArray { n, data })
}

pub fn second_fundamental_form_numeric(f: &CubicPotential, x: &[f64]) -> Result<ComponentArray> {
    let pt = immersion_point(f, x)?;
    second_fundamental_form_from(&pt.tangent, &pt.second)
}

/// First derivatives `F_A` and second derivatives `F_AB` of the immersion.
pub type Derivatives = (Vec<DVector<f64>>, Vec<Vec<DVector<f64>>>);

/// Central differences of `F` with one Richardson step.
pub fn finite_difference_derivatives(
    f: &CubicPotential,
    x: &[f64],
    step: f64,
) -> Result<Derivatives> {
    f.check_point(x)?;
    let n = f.n;
    let at = |shifts: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, d) in shifts {
            y[i] += d;
        }
        f.embed(&y)
    };
    let first_at = |a: usize, h: f64| (at(&[(a, h)]) - at(&[(a, -h)])) / (2.0 * h);
    let second_at = |a: usize, b: usize, h: f64| {
        if a == b {
            (at(&[(a, h)]) - at(&[]) * 2.0 + at(&[(a, -h)])) / (h * h)
        } else {
            (at(&[(a, h), (b, h)]) - at(&[(a, h), (b, -h)]) - at(&[(a, -h), (b, h)])
                + at(&[(a, -h), (b, -h)]))
                / (4.0 * h * h)
        }
    };
    let richardson = |coarse: DVector<f64>, fine: DVector<f64>| (fine * 4.0 - coarse) / 3.0;
    let tangent = (0..n)
        .map(|a| richardson(first_at(a, step), first_at(a, step / 2.0)))
        .collect();
    let second = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| richardson(second_at(a, b, step), second_at(a, b, step / 2.0)))
                .collect()
        })
        .collect();
    Ok((tangent, second))
}

/// `max_{A,B} |<J F_* e_A, F_* e_B>|`.
pub fn lagrangian_check(f: &CubicPotential, x: &[f64]) -> Result<f64> {
    let pt = immersion_point(f, x)?;
    let mut m: f64 = 0.0;
    for ta in &pt.tangent {
        let ja = complex_structure(ta);
        for tb in &pt.tangent {
            m = m.max(ja.dot(tb).abs());
        }
    }
    Ok(m)
}

/// Largest entrywise deviation between the recovered second fundamental
/// form of the gradient graph of `a` at `x` and `a` itself.
pub fn lemma1_roundtrip(a: &CubicForm, x: &[f64]) -> Result<f64> {
    let f = potential_from_tensor(a);
    Ok(second_fundamental_form_numeric(&f, x)?.max_diff_tensor(a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionReport {
    pub n: usize,
    pub x: Vec<f64>,
    /// `max |h_ABC - f_{x_A x_B x_C}(x)|`.
    pub roundtrip_error: f64,
    /// `max |h_ABC - a_ABC|`; the same number since the third partials are constant.
    pub tensor_error: f64,
    pub lagrangian_defect: f64,
    pub metric_condition: f64,
    /// Deviation between the exact and finite-difference pipelines.
    pub fd_crosscheck: Option<f64>,
}

pub fn immersion_report(a: &CubicForm, x: &[f64], fd: bool) -> Result<ImmersionReport> {
    let f = potential_from_tensor(a);
    let pt = immersion_point(&f, x)?;
    let sff = second_fundamental_form_from(&pt.tangent, &pt.second)?;
    let fd_crosscheck = if fd {
        let (t, s) = finite_difference_derivatives(&f, x, FD_STEP)?;
        Some(second_fundamental_form_from(&t, &s)?.max_abs_diff(&sff))
    } else {
        None
    };
    Ok(ImmersionReport {
        n: a.n(),
        x: x.to_vec(),
        roundtrip_error: sff.max_diff_potential(&f),
        tensor_error: sff.max_diff_tensor(a),
        lagrangian_defect: lagrangian_check(&f, x)?,
        metric_condition: condition_number(&pt.metric),
        fd_crosscheck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_tensor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_cube() {
        let a = CubicForm::symmetrize(2, [([1, 1, 1], 6.0)]).unwrap();
        let f = potential_from_tensor(&a);
        assert_eq!(f.value(&[2.0, 7.0]), 8.0);
        assert_eq!(f.third_partial(0, 0, 0), 6.0);
        assert_eq!(f.third_partial(0, 0, 1), 0.0);
    }

    #[test]
    fn zero_potential_is_flat() {
        let f = potential_from_tensor(&CubicForm::zeros(3).unwrap());
        assert!(f.polynomial().is_zero());
        let h = second_fundamental_form_numeric(&f, &[0.3, -0.2, 0.5]).unwrap();
        assert_eq!(h.max_abs(), 0.0);
        assert_eq!(lagrangian_check(&f, &[0.3, -0.2, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn third_partials_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_tensor(3, 2.0, &mut rng);
        let f = potential_from_tensor(&a);
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    assert_eq!(f.third_partial(x, y, z), a.get(x, y, z));
                }
            }
        }
    }

    #[test]
    fn origin_metric_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = potential_from_tensor(&random_tensor(4, 1.0, &mut rng));
        let pt = immersion_point(&f, &[0.0; 4]).unwrap();
        assert_eq!(pt.metric, DMatrix::identity(4, 4));
    }

    #[test]
    fn roundtrip_off_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_tensor(4, 1.0, &mut rng);
        assert!(lemma1_roundtrip(&a, &[0.0; 4]).unwrap() <= 1e-10);
        assert!(lemma1_roundtrip(&a, &[0.1, 0.1, 0.1, 0.1]).unwrap() <= 1e-8);
    }

    #[test]
    fn fd_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_tensor(3, 1.0, &mut rng);
        let r = immersion_report(&a, &[0.1, -0.05, 0.2], true).unwrap();
        assert!(r.fd_crosscheck.unwrap() < 1e-5, "{r:?}");
        assert!(r.lagrangian_defect <= 1e-12);
    }

    #[test]
    fn singular_metric_rejected() {
        let a = CubicForm::symmetrize(2, [([1, 1, 1], 1e4)]).unwrap();
        let f = potential_from_tensor(&a);
        let err = second_fundamental_form_numeric(&f, &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::SingularMetric(_)));
    }

    #[test]
    fn dimension_mismatch() {
        let f = potential_from_tensor(&CubicForm::zeros(3).unwrap());
        assert!(matches!(
            lagrangian_check(&f, &[0.0; 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
