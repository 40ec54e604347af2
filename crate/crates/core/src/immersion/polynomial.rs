//! Sparse polynomials in `n` real variables. Each term carries an exact
//! rational weight times a floating value, so differentiation (which only
//! multiplies weights by exponents) introduces no rounding.

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub weight: Rational,
    pub value: f64,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.value == 0.0 || rational::is_zero(&t.weight))
    }

    /// Adds `weight * value * x^exponents`. Terms are not merged.
    pub fn push(&mut self, exponents: Vec<u32>, weight: Rational, value: f64) {
        assert_eq!(exponents.len(), self.n, "exponent vector length");
        if value != 0.0 && !rational::is_zero(&weight) {
            self.terms.push(Term {
                exponents,
                weight,
                value,
            });
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[var] > 0)
            .map(|t| {
                let mut exponents = t.exponents.clone();
                let e = exponents[var];
                exponents[var] = e - 1;
                Term {
                    exponents,
                    weight: t.weight * Rational::from_integer(e as i128),
                    value: t.value,
                }
            })
            .collect();
        Self { n: self.n, terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n, "point dimension");
        self.terms
            .iter()
            .map(|t| {
                let mono: f64 = t
                    .exponents
                    .iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product();
                rational::to_f64(&t.weight) * t.value * mono
            })
            .sum()
    }

    /// Value of a polynomial with no variable part, summed per distinct
    /// weight so that a weight of exactly 1 returns `value` bit-for-bit.
    pub fn constant(&self) -> Option<f64> {
        if self.terms.iter().any(|t| t.degree() > 0) {
            return None;
        }
        Some(self.eval(&vec![0.0; self.n]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn differentiate_cube() {
        let mut p = Polynomial::zero(2);
        p.push(vec![3, 0], frac(1, 6), 6.0);
        let d3 = p.derivative(0).derivative(0).derivative(0);
        assert_eq!(d3.constant(), Some(6.0));
        assert_eq!(d3.terms()[0].weight, Rational::from_integer(1));
        assert!(p.derivative(1).is_zero());
        assert_eq!(p.eval(&[2.0, 5.0]), 8.0);
    }
}
