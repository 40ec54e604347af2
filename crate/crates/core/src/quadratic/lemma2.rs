//! Determinant of the matrix with `A_1, ..., A_k` on the diagonal and ones
//! everywhere else.

use num_traits::Num;

use crate::error::{Error, Result};

/// Closed form `prod (A_i - 1) + sum_i prod_{j != i} (A_j - 1)`.
pub fn det_closed<T: Num + Clone>(a: &[T]) -> Result<T> {
    if a.is_empty() {
        return Err(Error::EmptyList);
    }
    let shifted: Vec<T> = a.iter().map(|x| x.clone() - T::one()).collect();
    let full = shifted.iter().fold(T::one(), |acc, x| acc * x.clone());
    let partial = (0..shifted.len()).fold(T::zero(), |acc, i| {
        let prod = shifted
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(T::one(), |p, (_, x)| p * x.clone());
        acc + prod
    });
    Ok(full + partial)
}

/// Three-term recursion
/// `D_k = (A_k + A_{k-1} - 2) D_{k-1} - (A_{k-1} - 1)^2 D_{k-2}`
/// from `D_1 = A_1`, `D_2 = A_1 A_2 - 1`.
pub fn det_recursive<T: Num + Clone>(a: &[T]) -> Result<T> {
    let two = T::one() + T::one();
    match a {
        [] => Err(Error::EmptyList),
        [a1] => Ok(a1.clone()),
        [a1, a2, ..] => {
            let mut prev = a1.clone();
            let mut cur = a1.clone() * a2.clone() - T::one();
            for k in 2..a.len() {
                let d = a[k - 1].clone() - T::one();
                let next = (a[k].clone() + a[k - 1].clone() - two.clone()) * cur.clone()
                    - d.clone() * d * prev;
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}

/// Leading principal minors of `diag(d) + q (J - I)` (constant off-diagonal
/// `q`), through the closed form applied to `d / q`.
pub fn constant_offdiag_minors<T: Num + Clone>(d: &[T], q: &T) -> Vec<T> {
    (1..=d.len())
        .map(|j| {
            if q.is_zero() {
                d[..j].iter().fold(T::one(), |acc, x| acc * x.clone())
            } else {
                let scaled: Vec<T> = d[..j].iter().map(|x| x.clone() / q.clone()).collect();
                let mut qj = T::one();
                for _ in 0..j {
                    qj = qj * q.clone();
                }
                qj * det_closed(&scaled).expect("nonempty")
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int, Rational};

    #[test]
    fn anchors() {
        assert_eq!(det_closed(&[3.5]).unwrap(), 3.5);
        assert_eq!(det_recursive(&[3.5]).unwrap(), 3.5);
        let (x, y) = (frac(7, 3), frac(-2, 5));
        assert_eq!(det_closed(&[x, y]).unwrap(), x * y - int(1));
        assert_eq!(det_recursive(&[x, y]).unwrap(), x * y - int(1));
        assert_eq!(det_closed(&[2.0, 2.0, 2.0]).unwrap(), 4.0);
        assert_eq!(det_recursive(&[2.0, 2.0, 2.0]).unwrap(), 4.0);
        assert_eq!(det_closed::<f64>(&[]), Err(Error::EmptyList));
        assert_eq!(det_recursive::<f64>(&[]), Err(Error::EmptyList));
    }

    #[test]
    fn recursion_instance() {
        let a: [Rational; 3] = [frac(3, 2), frac(-4, 7), int(5)];
        let want = (a[2] + a[1] - int(2)) * (a[0] * a[1] - int(1)) - (a[1] - int(1)).pow(2) * a[0];
        assert_eq!(det_recursive(&a).unwrap(), want);
        assert_eq!(det_closed(&a).unwrap(), want);
    }

    #[test]
    fn minors_with_zero_offdiag() {
        let m = constant_offdiag_minors(&[2.0, 3.0, 4.0], &0.0);
        assert_eq!(m, vec![2.0, 6.0, 24.0]);
        // [[2,q],[q,3]] with q = -1: det = 6 - 1
        let m = constant_offdiag_minors(&[2.0_f64, 3.0], &-1.0);
        assert!((m[1] - 5.0).abs() < 1e-14);
    }
}
