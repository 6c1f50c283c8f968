//! Sparse multivariate polynomials with real or complex coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait Coeff:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> + PartialEq + Send + Sync
{
    fn zero() -> Self;
    fn real(x: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn real(x: f64) -> Self {
        x
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// `Σ c_β y^β`, terms sorted by exponent, no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    n: usize,
    terms: Vec<(Vec<u32>, T)>,
}

impl<T: Coeff> Poly<T> {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: Vec::new() }
    }

    pub fn constant(n: usize, c: T) -> Self {
        Poly::from_terms(n, vec![(vec![0; n], c)])
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Self {
        let mut map: BTreeMap<Vec<u32>, T> = BTreeMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), n);
            let slot = map.entry(e).or_insert_with(T::zero);
            *slot = *slot + c;
        }
        Poly {
            n,
            terms: map.into_iter().filter(|(_, c)| *c != T::zero()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<u32>, T)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, y: &[f64]) -> T {
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for (&k, &yi) in e.iter().zip(y) {
                if k > 0 {
                    m *= yi.powi(k as i32);
                }
            }
            acc = acc + *c * T::real(m);
        }
        acc
    }

    pub fn scale(&self, s: T) -> Self {
        Poly::from_terms(self.n, self.terms.iter().map(|(e, c)| (e.clone(), *c * s)))
    }

    /// `∂_i P`.
    pub fn partial(&self, i: usize) -> Self {
        Poly::from_terms(
            self.n,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, *c * T::real(e[i] as f64))
            }),
        )
    }

    /// `y_i^k P`.
    pub fn shift_up(&self, i: usize, k: u32) -> Self {
        Poly::from_terms(
            self.n,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] += k;
                (e2, *c)
            }),
        )
    }

    /// Operator `P ↦ ∂_i P − 2 b y_i P`, the derivative of `P e^{−b y_i²}`
    /// stripped of the Gaussian.
    pub fn gauss_partial(&self, i: usize, b: f64) -> Self {
        let d = self.partial(i);
        if b == 0.0 {
            return d;
        }
        d + self.shift_up(i, 1).scale(T::real(-2.0 * b))
    }

    /// Product of polynomials in disjoint variable blocks, `self` on the
    /// leading axes.
    pub fn tensor(&self, other: &Poly<T>) -> Self {
        let n = self.n + other.n;
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let mut e = e1.clone();
                e.extend_from_slice(e2);
                out.push((e, *c1 * *c2));
            }
        }
        Poly::from_terms(n, out)
    }
}

impl<T: Coeff> Add for Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: Poly<T>) -> Poly<T> {
        let n = self.n;
        Poly::from_terms(n, self.terms.into_iter().chain(rhs.terms))
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.push((e, *c1 * *c2));
            }
        }
        Poly::from_terms(self.n, out)
    }
}

impl Poly<Complex64> {
    pub fn conj(&self) -> Self {
        Poly::from_terms(self.n, self.terms.iter().map(|(e, c)| (e.clone(), c.conj())))
    }

    /// `|P|²` as a real polynomial.
    pub fn abs_squared(&self) -> Poly<f64> {
        let prod = self * &self.conj();
        Poly::from_terms(self.n, prod.terms.into_iter().map(|(e, c)| (e, c.re)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_and_tensor() {
        // P = 3x²y + y
        let p = Poly::from_terms(2, vec![(vec![2, 1], 3.0), (vec![0, 1], 1.0)]);
        assert_eq!(p.eval(&[2.0, 0.5]), 6.5);
        let px = p.partial(0);
        assert_eq!(px.eval(&[2.0, 0.5]), 6.0);
        let q = Poly::from_terms(1, vec![(vec![1], 2.0)]);
        let t = p.tensor(&q);
        assert_eq!(t.dim(), 3);
        assert_eq!(t.eval(&[2.0, 0.5, 3.0]), 6.5 * 6.0);
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = Poly::from_terms(1, vec![(vec![1], 1.0), (vec![1], -1.0)]);
        assert!(p.is_zero());
    }

    #[test]
    fn abs_squared_is_real() {
        let p = Poly::from_terms(1, vec![(vec![1], Complex64::new(0.0, 2.0)), (vec![0], Complex64::new(1.0, 0.0))]);
        let a = p.abs_squared();
        // |1 + 2iξ|² = 1 + 4ξ²
        assert_eq!(a.eval(&[0.5]), 2.0);
    }
}
