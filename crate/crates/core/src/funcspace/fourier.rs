//! Closed-form transforms `v̂(ξ) = ∫ v(x) e^{-i x·ξ} dx`.
//!
//! For `y^k e^{-a y²}` in one variable,
//! `F[y^k e^{-a y²}](ξ) = (i d/dξ)^k [√(π/a) e^{-ξ²/(4a)}]`, and a shift by
//! `c` multiplies by `e^{-i c·ξ}`; products factor over the axes.

use num_complex::Complex64;

use super::poly::Poly;
use super::TestFunction;
use crate::error::{Error, Result};

/// `scale · Q(ξ) · exp(-Σ bᵢ ξᵢ²) · exp(-i c·ξ)` with complex `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    pub scale: f64,
    pub b: Vec<f64>,
    pub shift: Vec<f64>,
    pub poly: Poly<Complex64>,
}

impl Transform {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        let q: f64 = self.b.iter().zip(xi).map(|(b, x)| b * x * x).sum();
        let phase: f64 = -self.shift.iter().zip(xi).map(|(c, x)| c * x).sum::<f64>();
        self.poly.eval(xi) * Complex64::from_polar(self.scale * (-q).exp(), phase)
    }

    /// `|v̂(ξ)|²`.
    pub fn power(&self, xi: &[f64]) -> f64 {
        let q: f64 = self.b.iter().zip(xi).map(|(b, x)| b * x * x).sum();
        self.poly.eval(xi).norm_sqr() * (self.scale * self.scale) * (-2.0 * q).exp()
    }

    /// Gaussian width shared by every axis, if any.
    pub fn isotropic_width(&self) -> Option<f64> {
        let b0 = *self.b.first()?;
        self.b.iter().all(|&b| (b - b0).abs() <= 1e-15 * b0).then_some(b0)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// Exact transform of a Gaussian-class member.
pub fn fourier_transform(f: &TestFunction) -> Result<Transform> {
    let e = f.expanded();
    let n = f.dim();
    if f.is_zero() {
        return Ok(Transform {
            scale: 0.0,
            b: vec![1.0; n],
            shift: vec![0.0; n],
            poly: Poly::zero(n),
        });
    }
    if !f.is_gaussian_class() {
        return Err(Error::Unsupported {
            op: "fourier_transform",
            reason: format!("{f} has no closed-form transform"),
        });
    }
    let b: Vec<f64> = e.a.iter().map(|a| 0.25 / a).collect();
    let scale: f64 = e.a.iter().map(|a| (std::f64::consts::PI / a).sqrt()).product();
    let i = Complex64::new(0.0, 1.0);
    let mut poly = Poly::zero(n);
    for (exps, c) in e.poly.terms() {
        let mut term = Poly::constant(n, Complex64::new(*c, 0.0));
        let mut ik = Complex64::new(1.0, 0.0);
        for (axis, &k) in exps.iter().enumerate() {
            for _ in 0..k {
                term = term.gauss_partial(axis, b[axis]);
                ik *= i;
            }
        }
        poly = poly + term.scale(ik);
    }
    Ok(Transform {
        scale,
        b,
        shift: e.center.clone(),
        poly,
    })
}
